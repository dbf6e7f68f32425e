#pragma once

// Reference computations used only by the tests. Each one takes a route that
// shares no code with the library implementation it checks.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double plain_weight(const std::vector<double>& e, double beta, std::size_t l, std::size_t k) {
  double z = 0.0;
  for (double x : e) z += std::exp(-beta * x);
  return std::exp(-0.5 * beta * (e[l] + e[k])) / z;
}

// Catalan numbers: moments of the semicircle, i.e. of the chain with b_n = 1.
inline std::vector<double> catalan(int n_max) {
  std::vector<double> c{1.0};
  for (int n = 0; n < n_max; ++n) c.push_back(c.back() * 2.0 * (2.0 * n + 1.0) / (n + 2.0));
  return c;
}

// Li_{-m}(z) by summing k^m z^k until the terms are negligible.
inline double polylog_series(int m, double z) {
  double s = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double t = std::pow(static_cast<double>(k), m) * std::pow(z, k);
    s += t;
    if (k > m && t < 1e-18 * s) break;
  }
  return s;
}

// Lowest eigenvalue of -(1/2m) psi'' + x^p psi by shooting from x = 0 with RK4.
// parity 0: psi(0)=1, psi'(0)=0; parity 1: psi(0)=0, psi'(0)=1.
inline double shoot_tail(double e, int p, double mass, int parity, double x_max) {
  const int steps = 20000;
  const double h = x_max / steps;
  double y = parity ? 0.0 : 1.0, v = parity ? 1.0 : 0.0, x = 0.0;
  auto acc = [&](double xx, double yy) { return 2.0 * mass * (std::pow(xx, p) - e) * yy; };
  for (int i = 0; i < steps; ++i) {
    const double k1y = v, k1v = acc(x, y);
    const double k2y = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h, y + 0.5 * h * k1y);
    const double k3y = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h, y + 0.5 * h * k2y);
    const double k4y = v + h * k3v, k4v = acc(x + h, y + h * k3y);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    x += h;
    if (std::abs(y) > 1e30) break;
  }
  return y;
}

inline double shooting_level(int p, double mass, int parity, double lo, double hi, double x_max) {
  double flo = shoot_tail(lo, p, mass, parity, x_max);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = shoot_tail(mid, p, mass, parity, x_max);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson rule.
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
