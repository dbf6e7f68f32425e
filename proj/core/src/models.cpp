#include "opgrowth/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "linalg.hpp"
#include "quadrature.hpp"

namespace opgrowth {

namespace {

using u128 = unsigned __int128;

// Exact for every q used here: C(q, j) * q stays below 2^128 up to q ~ 120.
u128 binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<u128>(n - k + i) / static_cast<u128>(i);
  return c;
}

void require_even_power(int p, int lowest) {
  require(p >= lowest && p % 2 == 0, ErrorCode::invalid_argument,
          "potential power p must be even and >= " + std::to_string(lowest));
}

void require_tunnelling_power(int p) {
  require(p != 2, ErrorCode::pole,
          "p = 2 has a pole in Gamma((p-2)/2p); the tunnelling integral diverges");
  require_even_power(p, 4);
}

// sqrt(m) * (sqrt 2 / p) * (sqrt(pi)/2) * Gamma(a - 1/2) / Gamma(a), a = (p-1)/p
double tunnelling_prefactor(int p, double mass) {
  const double a = (p - 1.0) / p;
  return std::sqrt(mass) * std::numbers::sqrt2 / p * 0.5 * std::sqrt(std::numbers::pi) *
         std::tgamma(a - 0.5) / std::tgamma(a);
}

Matrix symmetric_from_upper(const Matrix& m) {
  Matrix s = m.triangularView<Eigen::Upper>();
  s.triangularView<Eigen::StrictlyLower>() = m.triangularView<Eigen::StrictlyUpper>().transpose();
  return s;
}

}  // namespace

std::string_view to_string(DecayClass c) noexcept {
  switch (c) {
    case DecayClass::flat: return "flat";
    case DecayClass::power: return "power";
    case DecayClass::exponential: return "exponential";
    case DecayClass::gaussian: return "gaussian";
  }
  return "flat";
}

DecayClass parse_decay_class(std::string_view s) {
  if (s == "flat") return DecayClass::flat;
  if (s == "power") return DecayClass::power;
  if (s == "exponential") return DecayClass::exponential;
  if (s == "gaussian") return DecayClass::gaussian;
  throw Error(ErrorCode::invalid_argument, "unknown decay class '" + std::string(s) + "'");
}

void StructureSpec::validate() const {
  switch (decay) {
    case DecayClass::flat: return;
    case DecayClass::power:
      require(parameter > 0.0, ErrorCode::invalid_argument, "power-law exponent a must be > 0");
      return;
    case DecayClass::exponential:
      require(parameter > 0.0, ErrorCode::invalid_argument, "exponential rate gamma must be > 0");
      return;
    case DecayClass::gaussian:
      require(parameter > 0.0, ErrorCode::invalid_argument, "gaussian width sigma must be > 0");
      return;
  }
}

double StructureSpec::log_envelope(double omega) const {
  const double w = std::abs(omega);
  switch (decay) {
    case DecayClass::flat: return 0.0;
    case DecayClass::power: return -parameter * std::log1p(w);
    case DecayClass::exponential: return -parameter * w;
    case DecayClass::gaussian: return -w * w / (2.0 * parameter * parameter);
  }
  return 0.0;
}

double StructureSpec::envelope(double omega) const { return std::exp(log_envelope(omega)); }

// --- harmonic oscillator -------------------------------------------------

ModelData harmonic_position(std::size_t dim, double mass, double omega) {
  require(dim >= 2, ErrorCode::invalid_argument, "harmonic_position needs dim >= 2");
  require(mass > 0.0 && omega > 0.0, ErrorCode::invalid_argument, "mass and omega must be > 0");
  const double s = std::sqrt(1.0 / (2.0 * mass * omega));
  Matrix x = Matrix::Zero(dim, dim);
  std::vector<double> e(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    e[k] = omega * (k + 0.5);
    if (k + 1 < dim) {
      x(k + 1, k) = s * std::sqrt(static_cast<double>(k + 1));
      x(k, k + 1) = x(k + 1, k);
    }
  }
  return {Spectrum(std::move(e)), EigenbasisOperator(std::move(x)), {}};
}

EigenbasisOperator harmonic_power(std::size_t dim, int q, double mass, double omega) {
  require(dim >= 1 && q >= 1, ErrorCode::invalid_argument, "harmonic_power needs dim >= 1, q >= 1");
  require(mass > 0.0 && omega > 0.0, ErrorCode::invalid_argument, "mass and omega must be > 0");
  const std::size_t n = dim + static_cast<std::size_t>(q);
  const double s = std::sqrt(1.0 / (2.0 * mass * omega));
  std::vector<double> off(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) off[k] = s * std::sqrt(static_cast<double>(k + 1));

  // column k of x^q is x applied q times to e_k; the support grows by one per step
  Matrix result(dim, dim);
  std::vector<double> v(n), w(n);
  for (std::size_t k = 0; k < dim; ++k) {
    std::fill(v.begin(), v.end(), 0.0);
    v[k] = 1.0;
    std::size_t lo = k, hi = k;
    for (int step = 0; step < q; ++step) {
      const std::size_t nlo = lo > 0 ? lo - 1 : 0;
      const std::size_t nhi = std::min(hi + 1, n - 1);
      for (std::size_t i = nlo; i <= nhi; ++i) {
        double acc = 0.0;
        if (i > 0) acc += off[i - 1] * v[i - 1];
        if (i + 1 < n) acc += off[i] * v[i + 1];
        w[i] = acc;
      }
      for (std::size_t i = nlo; i <= nhi; ++i) v[i] = w[i];
      lo = nlo;
      hi = nhi;
    }
    for (std::size_t l = 0; l < dim; ++l) result(l, k) = v[l];
  }
  return EigenbasisOperator(symmetric_from_upper(result));
}

double uq_binomial_element(int q, long l, long k) {
  require(q >= 1 && l >= 0 && k >= 0, ErrorCode::invalid_argument, "uq_binomial needs q >= 1, l,k >= 0");
  const long d = std::abs(l - k);
  if (d > q || (q - d) % 2 != 0) return 0.0;
  const u128 bulk = binomial(q, static_cast<int>((q - d) / 2));
  if (l + k >= q) return static_cast<double>(bulk);
  const u128 image = binomial(q, static_cast<int>((q - (l + k)) / 2 - 1));
  return static_cast<double>(bulk - image);
}

EigenbasisOperator uq_binomial(std::size_t dim, int q) {
  require(dim >= 1, ErrorCode::invalid_argument, "uq_binomial needs dim >= 1");
  Matrix m(dim, dim);
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t l = 0; l < dim; ++l)
      m(l, k) = uq_binomial_element(q, static_cast<long>(l), static_cast<long>(k));
  return EigenbasisOperator(std::move(m));
}

double gaussian_decay_estimate(int q, long l, long k) {
  require(q >= 1, ErrorCode::invalid_argument, "gaussian_decay_estimate needs q >= 1");
  const double d = static_cast<double>(l - k);
  return std::ldexp(std::sqrt(2.0 / (std::numbers::pi * q)), q) * std::exp(-d * d / (2.0 * q));
}

// --- infinite wells -------------------------------------------------------

ModelData box_position_1d(std::size_t dim, double length, double mass) {
  require(dim >= 2, ErrorCode::invalid_argument, "box_position_1d needs dim >= 2");
  require(length > 0.0 && mass > 0.0, ErrorCode::invalid_argument, "length and mass must be > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  std::vector<double> e(dim);
  Matrix x = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double n = static_cast<double>(i + 1);
    e[i] = n * n * pi2 / (2.0 * mass * length * length);
    for (std::size_t j = 0; j < i; ++j) {
      if ((i + j) % 2 == 0) continue;  // quantum numbers i+1, j+1 of opposite parity
      const double m = static_cast<double>(j + 1);
      const double d = n * n - m * m;
      x(i, j) = length * 8.0 * n * m / (pi2 * d * d);
      x(j, i) = x(i, j);
    }
  }
  return {Spectrum(std::move(e)), EigenbasisOperator(std::move(x)), {}};
}

Box2dData box_position_2d(std::array<std::size_t, 2> dims, std::array<double, 2> lengths,
                          double mass) {
  require(dims[0] >= 1 && dims[1] >= 1 && dims[0] * dims[1] >= 2, ErrorCode::invalid_argument,
          "box_position_2d needs at least two product states");
  require(lengths[0] > 0.0 && lengths[1] > 0.0 && mass > 0.0, ErrorCode::invalid_argument,
          "lengths and mass must be > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  auto level = [&](int n, double len) { return n * n * pi2 / (2.0 * mass * len * len); };

  struct State {
    double energy;
    int nx, ny;
  };
  std::vector<State> states;
  states.reserve(dims[0] * dims[1]);
  for (std::size_t i = 0; i < dims[0]; ++i)
    for (std::size_t j = 0; j < dims[1]; ++j) {
      const int nx = static_cast<int>(i) + 1, ny = static_cast<int>(j) + 1;
      states.push_back({level(nx, lengths[0]) + level(ny, lengths[1]), nx, ny});
    }
  std::stable_sort(states.begin(), states.end(),
                   [](const State& a, const State& b) { return a.energy < b.energy; });

  const std::size_t d = states.size();
  Box2dData out{{Spectrum({0.0}), EigenbasisOperator(Matrix::Zero(1, 1)), {}}, {}};
  std::vector<double> e(d);
  out.labels.resize(d);
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < d; ++i) {
    e[i] = states[i].energy;
    out.labels[i] = {states[i].nx, states[i].ny};
    if (i > 0 && e[i] - e[i - 1] <= 1e-10 * std::max(1.0, std::abs(e[i]))) ++collisions;
  }
  if (collisions > 0) {
    std::ostringstream msg;
    msg << "box_position_2d: " << collisions
        << " energy collisions within 1e-10 (commensurate side lengths); degenerate Bohr frequencies";
    out.warnings.push_back(msg.str());
  }

  Matrix x = Matrix::Zero(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < a; ++b) {
      if (states[a].ny != states[b].ny) continue;
      const int n = states[a].nx, m = states[b].nx;
      if ((n + m) % 2 == 0) continue;
      const double dd = static_cast<double>(n * n - m * m);
      x(a, b) = lengths[0] * 8.0 * n * m / (pi2 * dd * dd);
      x(b, a) = x(a, b);
    }
  out.spectrum = Spectrum(std::move(e));
  out.op = EigenbasisOperator(std::move(x));
  return out;
}

// --- V(x) = x^p -----------------------------------------------------------

double bohr_sommerfeld_g(int p) {
  require(p >= 1, ErrorCode::invalid_argument, "p must be >= 1");
  return std::tgamma(1.0 + 1.0 / p) * std::tgamma(1.5) / std::tgamma(1.0 / p + 1.5);
}

double bohr_sommerfeld_energy(int p, double n, double mass) {
  require_even_power(p, 2);
  require(n >= 0.0 && mass > 0.0, ErrorCode::invalid_argument, "need n >= 0 and mass > 0");
  const double e = 2.0 * p / (p + 2.0);
  const double base = std::numbers::pi / (2.0 * std::sqrt(2.0 * mass) * bohr_sommerfeld_g(p));
  return std::pow(base, e) * std::pow(n + 0.5, e);
}

AnharmonicData anharmonic_solve(const AnharmonicConfig& cfg) {
  require_even_power(cfg.p, 2);
  require(cfg.mass > 0.0, ErrorCode::invalid_argument, "mass must be > 0");
  require(cfg.n_states >= 2, ErrorCode::invalid_argument, "n_states must be >= 2");
  require(cfg.grid_points > cfg.n_states, ErrorCode::invalid_argument,
          "grid_points must exceed n_states");

  const double e_top = bohr_sommerfeld_energy(cfg.p, cfg.n_states - 1.0, cfg.mass);
  const double a = cfg.grid_halfwidth.value_or(1.5 * std::pow(e_top, 1.0 / cfg.p));
  require(a > 0.0, ErrorCode::invalid_argument, "grid_halfwidth must be > 0");

  // Dirichlet walls at +-a; interior points symmetric about the origin
  const int n = cfg.grid_points;
  const double h = 2.0 * a / (n + 1);
  const double kin = 1.0 / (2.0 * cfg.mass * h * h);
  std::vector<double> x(n), diag(n), off(n - 1, -kin);
  for (int i = 0; i < n; ++i) {
    x[i] = -a + (i + 1) * h;
    diag[i] = 2.0 * kin + std::pow(x[i], cfg.p);
  }
  linalg::EigenPairs ep = linalg::tridiagonal_lowest(diag, off, cfg.n_states);

  Matrix& v = ep.vectors;
  double leak = 0.0;
  for (int s = 0; s < cfg.n_states; ++s) {
    Eigen::Index imax = 0;
    v.col(s).cwiseAbs().maxCoeff(&imax);
    if (v(imax, s) < 0.0) v.col(s) *= -1.0;
    // continuum amplitude psi = v / sqrt(h)
    leak = std::max({leak, std::abs(v(0, s)) / std::sqrt(h), std::abs(v(n - 1, s)) / std::sqrt(h)});
  }
  if (leak >= cfg.boundary_tolerance) {
    std::ostringstream msg;
    msg << "anharmonic_solve: eigenfunction amplitude " << leak << " at the grid boundary exceeds "
        << cfg.boundary_tolerance << "; increase grid_halfwidth";
    throw Error(ErrorCode::boundary_leak, msg.str());
  }

  Eigen::Map<const Vector> xs(x.data(), n);
  Matrix xm = v.transpose() * (xs.asDiagonal() * v);
  Matrix sym = 0.5 * (xm + xm.transpose());

  double largest = 0.0;
  for (Eigen::Index k = 0; k < sym.cols(); ++k)
    for (Eigen::Index l = 0; l < sym.rows(); ++l)
      if (l != k) largest = std::max(largest, std::abs(sym(l, k)));
  Mask floor = (sym.array().abs() < cfg.floor_rel * largest);

  std::vector<double> e(ep.values.data(), ep.values.data() + ep.values.size());
  AnharmonicData out{{Spectrum(std::move(e)), EigenbasisOperator(std::move(sym)), {}}, a, leak};
  const std::size_t flagged = static_cast<std::size_t>(floor.count());
  out.op.set_below_floor(std::move(floor));
  if (flagged > 0) {
    std::ostringstream msg;
    msg << "anharmonic_solve: " << flagged << " matrix elements below precision floor "
        << cfg.floor_rel << " x max";
    out.warnings.push_back(msg.str());
  }
  return out;
}

double tunnelling_integrand(int p, double u, double mass) {
  require_tunnelling_power(p);
  require(u > 0.0 && mass > 0.0, ErrorCode::invalid_argument, "need u > 0 and mass > 0");
  return tunnelling_prefactor(p, mass) * std::pow(u, (2.0 - p) / (2.0 * p));
}

double tunnelling_integrand_quadrature(int p, double u, double mass) {
  require_tunnelling_power(p);
  require(u > 0.0 && mass > 0.0, ErrorCode::invalid_argument, "need u > 0 and mass > 0");
  const double turning = std::pow(u, 1.0 / p);
  // x = turning + t^2 removes the inverse square-root singularity at the turning point
  const double at_turning = 2.0 / std::sqrt(2.0 * p * u / turning);
  auto f = [&](double t) {
    const double gap = u * std::expm1(p * std::log1p(t * t / turning));
    if (!(gap > 0.0)) return at_turning;
    const double v = 2.0 * t / std::sqrt(2.0 * gap);
    return std::isfinite(v) ? v : at_turning;
  };
  return std::sqrt(mass) * quad::half_infinite(f, 0.0, 1e-12);
}

double semiclassical_rate(int p, double mass) {
  require_tunnelling_power(p);
  require(mass > 0.0, ErrorCode::invalid_argument, "mass must be > 0");
  // K(p) * C(p)^{(p+2)/2p}; the mass drops out between I(u) and the levels
  const double k = std::sqrt(2.0 * std::numbers::pi) / (p + 2.0) *
                   std::tgamma((p - 2.0) / (2.0 * p)) / std::tgamma((p - 1.0) / p);
  return k * std::numbers::pi / (2.0 * std::numbers::sqrt2 * bohr_sommerfeld_g(p));
}

double SemiclassicalLog::relative_difference() const {
  return std::abs(closed_form - quadrature) / std::max(std::abs(closed_form), 1e-300);
}

SemiclassicalLog semiclassical_log_element(int p, int n, int m, double mass) {
  require_tunnelling_power(p);
  require(n >= 0 && m >= 0, ErrorCode::invalid_argument, "quantum numbers must be >= 0");
  SemiclassicalLog out;
  out.closed_form = semiclassical_rate(p, mass) * std::abs(n - m);
  if (n == m) return out;
  const double lo = bohr_sommerfeld_energy(p, std::min(n, m), mass);
  const double hi = bohr_sommerfeld_energy(p, std::max(n, m), mass);
  out.quadrature = quad::finite(
      [&](double u) { return tunnelling_integrand_quadrature(p, u, mass); }, lo, hi, 1e-11);
  return out;
}

ModelData semiclassical_operator(int p, std::size_t dim, double mass, double prefactor,
                                 const EigenbasisOperator* exact_nearest) {
  require_tunnelling_power(p);
  require(dim >= 2, ErrorCode::invalid_argument, "semiclassical_operator needs dim >= 2");
  require(prefactor > 0.0, ErrorCode::invalid_argument, "prefactor must be > 0");
  if (exact_nearest) {
    require(exact_nearest->dimension() >= dim, ErrorCode::dimension_mismatch,
            "exact nearest-neighbour source smaller than requested dimension");
  }
  const double rate = semiclassical_rate(p, mass);
  std::vector<double> e(dim);
  Matrix x = Matrix::Zero(dim, dim);
  for (std::size_t l = 0; l < dim; ++l) {
    e[l] = bohr_sommerfeld_energy(p, static_cast<double>(l), mass);
    for (std::size_t k = 0; k < l; ++k) {
      const std::size_t d = l - k;
      if (d % 2 == 0) continue;
      x(l, k) = (d == 1 && exact_nearest) ? (*exact_nearest)(l, k) : prefactor * std::exp(-rate * d);
      x(k, l) = x(l, k);
    }
  }
  return {Spectrum(std::move(e)), EigenbasisOperator(std::move(x)), {}};
}

// --- random-matrix ensembles ----------------------------------------------

ModelData random_ensemble(std::size_t dim, const StructureSpec& spec, double bandwidth,
                          std::uint64_t seed) {
  require(dim >= 2, ErrorCode::invalid_argument, "random_ensemble needs dim >= 2");
  require(bandwidth > 0.0, ErrorCode::invalid_argument, "bandwidth must be > 0");
  spec.validate();
  std::vector<double> e(dim);
  for (std::size_t i = 0; i < dim; ++i) e[i] = bandwidth * static_cast<double>(i) / (dim - 1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix o(dim, dim);
  for (std::size_t l = 0; l < dim; ++l)
    for (std::size_t k = l; k < dim; ++k) {
      const double r = normal(rng);
      o(l, k) = spec.envelope(e[k] - e[l]) * r * inv_sqrt_d;
      o(k, l) = o(l, k);
    }
  return {Spectrum(std::move(e)), EigenbasisOperator(std::move(o)), {}};
}

}  // namespace opgrowth
