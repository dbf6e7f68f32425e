#pragma once

// Boost.Math quadrature behind a small interface so only a few translation
// units pull in the heavy headers.

#include <functional>

namespace opgrowth::quad {

/// Adaptive Gauss-Kronrod on [a, b].
double finite(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

/// Double-exponential rule on [a, inf).
double half_infinite(const std::function<double(double)>& f, double a, double rel_tol = 1e-13);

}  // namespace opgrowth::quad
