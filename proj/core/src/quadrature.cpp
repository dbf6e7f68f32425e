#include <limits>
#include "quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace opgrowth::quad {

double finite(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol, &err);
}

double half_infinite(const std::function<double(double)>& f, double a, double rel_tol) {
  boost::math::quadrature::exp_sinh<double> rule;
  return rule.integrate([&](double t) { return f(t); }, a, std::numeric_limits<double>::infinity(),
                        rel_tol);
}

}  // namespace opgrowth::quad
