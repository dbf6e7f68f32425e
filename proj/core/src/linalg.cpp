#include "linalg.hpp"

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

namespace opgrowth::linalg {

EigenPairs symmetric_eigen(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorCode::dimension_mismatch, "symmetric_eigen: matrix not square");
  EigenPairs out;
  // The system OpenBLAS selects a dgemm kernel on some AVX-512 hosts that returns
  // wrong products for n >= ~200, which corrupts every blocked LAPACK eigensolver.
  // Householder reduction stays in Eigen; only the tridiagonal solve goes to LAPACK.
  const Eigen::Tridiagonalization<Matrix> tri(a);
  const Vector d = tri.diagonal();
  const Vector sub = tri.subDiagonal();
  EigenPairs t = tridiagonal_eigen(std::vector<double>(d.data(), d.data() + d.size()),
                                   std::vector<double>(sub.data(), sub.data() + sub.size()));
  out.values = std::move(t.values);
  out.vectors = tri.matrixQ() * t.vectors;
  return out;
}

EigenPairs tridiagonal_lowest(const std::vector<double>& diag, const std::vector<double>& off,
                              int count) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  require(count >= 1 && count <= n && off.size() + 1 == diag.size(), ErrorCode::invalid_argument,
          "tridiagonal_lowest: bad sizes");
  std::vector<double> d = diag;
  std::vector<double> e = off;
  e.push_back(0.0);
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, count);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1,
                                   count, 0.0, &found, out.values.data(), out.vectors.data(), n,
                                   isuppz.data());
  require(info == 0 && found == count, ErrorCode::eigensolver_failure,
          "dstevr failed, info=" + std::to_string(info));
  out.values.conservativeResize(count);
  return out;
}

EigenPairs tridiagonal_eigen(const std::vector<double>& diag, const std::vector<double>& off) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  require(n >= 1 && off.size() + 1 == diag.size(), ErrorCode::invalid_argument,
          "tridiagonal_eigen: bad sizes");
  std::vector<double> d = diag;
  std::vector<double> e = off;
  e.push_back(0.0);
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0,
                                   0.0, &found, out.values.data(), out.vectors.data(), n,
                                   isuppz.data());
  require(info == 0 && found == n, ErrorCode::eigensolver_failure,
          "dstevr failed, info=" + std::to_string(info));
  return out;
}

}  // namespace opgrowth::linalg
