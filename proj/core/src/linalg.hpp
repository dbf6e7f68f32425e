#pragma once

// Thin LAPACK wrappers used by the model builders and the chain propagator.

#include <vector>

#include "opgrowth/spectral.hpp"

namespace opgrowth::linalg {

struct EigenPairs {
  Vector values;
  Matrix vectors;  // columns
};

/// Full decomposition of a dense real symmetric matrix (dsyevd), ascending eigenvalues.
EigenPairs symmetric_eigen(const Matrix& a);

/// Lowest `count` eigenpairs of a symmetric tridiagonal matrix (dstevr).
EigenPairs tridiagonal_lowest(const std::vector<double>& diag, const std::vector<double>& off,
                              int count);

/// All eigenpairs of a symmetric tridiagonal matrix (MRRR).
EigenPairs tridiagonal_eigen(const std::vector<double>& diag, const std::vector<double>& off);

}  // namespace opgrowth::linalg
