#pragma once

// Paired-double ("double-double") arithmetic, ~32 significant digits.
// Only the operations needed by the moment recursions and the extended
// inner products are provided.

#include <cmath>

namespace opgrowth {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double x) : hi(x), lo(0.0) {}  // NOLINT: implicit by design of the number type
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi + lo; }
};

namespace dd_detail {

inline DoubleDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DoubleDouble quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = dd_detail::two_sum(a.hi, b.hi);
  DoubleDouble t = dd_detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = dd_detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  DoubleDouble p = dd_detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
  double q1 = a.hi / b.hi;
  DoubleDouble r = a - b * DoubleDouble(q1);
  double q2 = r.hi / b.hi;
  r = r - b * DoubleDouble(q2);
  double q3 = r.hi / b.hi;
  DoubleDouble q = dd_detail::quick_two_sum(q1, q2);
  return q + DoubleDouble(q3);
}

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }
inline DoubleDouble& operator/=(DoubleDouble& a, DoubleDouble b) { return a = a / b; }

inline bool operator<(DoubleDouble a, DoubleDouble b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(DoubleDouble a, DoubleDouble b) { return b < a; }
inline bool operator<=(DoubleDouble a, DoubleDouble b) { return !(b < a); }

inline DoubleDouble sqrt(DoubleDouble a) {
  if (a.hi <= 0.0) return DoubleDouble(0.0);
  double x = std::sqrt(a.hi);
  // one Newton step in extended arithmetic
  DoubleDouble xx = dd_detail::two_prod(x, x);
  DoubleDouble r = a - xx;
  return dd_detail::quick_two_sum(x, r.hi / (2.0 * x));
}

inline DoubleDouble abs(DoubleDouble a) { return a.hi < 0.0 ? -a : a; }

/// Running sum that is either plain double or double-double.
class Accumulator {
 public:
  explicit Accumulator(bool extended) : extended_(extended) {}

  void add(double x) {
    if (extended_) {
      sum_ += DoubleDouble(x);
    } else {
      sum_.hi += x;
    }
  }
  void add_product(double a, double b) {
    if (extended_) {
      sum_ += dd_detail::two_prod(a, b);
    } else {
      sum_.hi += a * b;
    }
  }
  DoubleDouble extended_value() const { return sum_; }
  double value() const { return sum_.hi + sum_.lo; }

 private:
  bool extended_;
  DoubleDouble sum_;
};

}  // namespace opgrowth
