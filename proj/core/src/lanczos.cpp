#include "opgrowth/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace opgrowth {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b, bool extended) {
  Accumulator acc(extended);
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) acc.add_product(a[i], b[i]);
  return acc.value();
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, stderr_slope = 0.0, r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  f.stderr_slope = m > 2 ? std::sqrt(ssr / (m - 2) / sxx) : 0.0;
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

double window_slope(const LanczosSequence& b, std::size_t lo, std::size_t hi) {
  std::vector<double> x, y;
  for (std::size_t n = lo; n <= hi; ++n) {
    x.push_back(static_cast<double>(n));
    y.push_back(b.b(n));
  }
  return fit_line(x, y).slope;
}

}  // namespace

double MomentSequence::moment(std::size_t n) const {
  require(n >= 1 && n <= log_moments.size(), ErrorCode::invalid_argument, "moment index out of range");
  return std::exp(log_moments[n - 1]);
}

bool MomentSequence::log_convex(double slack) const {
  for (std::size_t n = 1; n < log_moments.size(); ++n) {
    const double prev = n >= 2 ? log_moments[n - 2] : 0.0;
    if (normalized || n >= 2) {
      const double lhs = log_moments[n] + prev;
      const double rhs = 2.0 * log_moments[n - 1];
      if (lhs < rhs - slack * std::max(1.0, std::abs(rhs))) return false;
    }
  }
  return true;
}

MomentSequence moments_from_values(const std::vector<double>& mu, bool normalized) {
  MomentSequence out;
  out.normalized = normalized;
  for (double m : mu) {
    require(m > 0.0 && std::isfinite(m), ErrorCode::invalid_argument, "moments must be positive and finite");
    out.log_moments.push_back(std::log(m));
  }
  return out;
}

LanczosRun lanczos_run_detailed(const EigenbasisOperator& seed, const Spectrum& spectrum,
                                const ThermalEnsemble& ens, std::size_t n_max,
                                const LanczosOptions& options) {
  require(n_max >= 1, ErrorCode::invalid_argument, "n_max must be >= 1");
  require(options.termination_tolerance > 0.0, ErrorCode::invalid_argument,
          "termination tolerance must be > 0");
  const bool extended = options.precision == Precision::extended;

  LanczosRun run;
  LanczosSequence& seq = run.sequence;
  seq.precision_mode = options.precision;
  seq.reorthogonalized = options.reorthogonalize;

  run.atoms = pack_off_diagonal(seed, spectrum, ens, options.floor_policy);
  const BohrAtoms& atoms = run.atoms;
  const double norm2 = atoms.norm_squared(options.precision);
  require(atoms.size() > 0 && norm2 > 0.0, ErrorCode::zero_norm,
          "seed operator has no off-diagonal weight (static operator)");
  seq.seed_norm = std::sqrt(norm2) * atoms.scale;

  if (const std::size_t flagged = seed.below_floor_count(); flagged > 0) {
    std::ostringstream msg;
    msg << flagged << " seed elements below precision floor were "
        << (options.floor_policy == FloorPolicy::zero ? "zeroed" : "kept");
    seq.warnings.push_back(msg.str());
  }

  const std::size_t m = atoms.size();
  const std::vector<double>& omega = atoms.omega;
  std::vector<std::vector<double>> basis;
  {
    std::vector<double> v0(atoms.amplitude);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& a : v0) a *= inv;
    basis.push_back(std::move(v0));
  }
  const bool keep_all = options.reorthogonalize || options.keep_basis;

  double b_prev = 0.0, b_first = 0.0;
  std::vector<double> w(m);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const std::vector<double>& cur = basis.back();
    // L acts on the upper-triangle amplitude as multiplication by -omega
    for (std::size_t i = 0; i < m; ++i) w[i] = -omega[i] * cur[i];
    if (n >= 2) axpy(-b_prev, basis[basis.size() - 2], w);

    if (options.reorthogonalize) {
      // Krylov vectors alternate between symmetric and antisymmetric matrices,
      // so only vectors of the parity of O_n overlap with w
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = n % 2; j < n; j += 2) {
          const double c = dot(w, basis[j], extended);
          axpy(-c, basis[j], w);
        }
      }
    }

    const double bn = std::sqrt(dot(w, w, extended));
    if (n == 1) {
      if (!(bn > 0.0) || !std::isfinite(bn)) {
        seq.terminated_at = 1;
        break;
      }
      b_first = bn;
    } else if (bn < options.termination_tolerance * b_first) {
      seq.terminated_at = n;
      break;
    }
    seq.coefficients.push_back(bn);
    const double inv = 1.0 / bn;
    std::vector<double> next(w);
    for (double& a : next) a *= inv;
    basis.push_back(std::move(next));
    if (!keep_all && basis.size() > 2) basis.erase(basis.begin());
    b_prev = bn;
  }

  if (options.keep_basis) run.basis = std::move(basis);
  return run;
}

LanczosSequence lanczos_run(const EigenbasisOperator& seed, const Spectrum& spectrum,
                            const ThermalEnsemble& ens, std::size_t n_max,
                            const LanczosOptions& options) {
  LanczosOptions opts = options;
  opts.keep_basis = false;
  return lanczos_run_detailed(seed, spectrum, ens, n_max, opts).sequence;
}

LiouvilleVector krylov_vector(const LanczosRun& run, std::size_t n, const ThermalEnsemble& ens) {
  require(n < run.basis.size(), ErrorCode::invalid_argument,
          "Krylov vector not available (run with keep_basis)");
  const BohrAtoms& atoms = run.atoms;
  const auto d = static_cast<Eigen::Index>(atoms.dimension);
  LiouvilleVector out{Matrix::Zero(d, d)};
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  const std::vector<double>& amp = run.basis[n];
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::uint32_t l = atoms.row[i], k = atoms.col[i];
    const double v = amp[i] / (std::sqrt(2.0) * ens.root(l) * ens.root(k));
    out.amplitudes(l, k) = v;
    out.amplitudes(k, l) = sign * v;
  }
  return out;
}

MomentSequence moments_from_lanczos(const LanczosSequence& b, std::optional<std::size_t> n_moments,
                                    Precision precision) {
  const std::size_t k = b.size();
  const std::size_t count = n_moments.value_or(k);
  require(k >= 1, ErrorCode::zero_norm, "moments_from_lanczos: empty coefficient sequence");
  require(count >= 1, ErrorCode::invalid_argument, "moments_from_lanczos: need at least one moment");
  double unit = 0.0;
  for (double x : b.coefficients) {
    require(x > 0.0 && std::isfinite(x), ErrorCode::invalid_argument, "coefficients must be positive");
    unit = std::max(unit, x);
  }

  MomentSequence out;
  out.normalized = true;
  out.log_unit = std::log(unit);
  out.log_moments.resize(count);
  const bool extended = precision == Precision::extended;

  // sites 0..k; T/unit applied to a renormalized vector each step
  const std::size_t sites = k + 1;
  std::vector<DoubleDouble> t(k);
  for (std::size_t i = 0; i < k; ++i) t[i] = DoubleDouble(b.coefficients[i]) / DoubleDouble(unit);
  std::vector<DoubleDouble> v(sites), w(sites);
  v[0] = DoubleDouble(1.0);
  double log_acc = 0.0;
  DoubleDouble scaled(1.0);
  bool scaled_ok = extended;
  for (std::size_t n = 1; n <= count; ++n) {
    for (std::size_t i = 0; i < sites; ++i) {
      DoubleDouble acc;
      if (i > 0) acc += t[i - 1] * v[i - 1];
      if (i + 1 < sites) acc += t[i] * v[i + 1];
      w[i] = extended ? acc : DoubleDouble(acc.hi);
    }
    DoubleDouble c2;
    for (std::size_t i = 0; i < sites; ++i) c2 += w[i] * w[i];
    if (!extended) c2 = DoubleDouble(c2.hi);
    require(c2.hi > 0.0, ErrorCode::zero_norm, "moments_from_lanczos: chain vector vanished");
    log_acc += std::log(c2.hi) + std::log1p(c2.lo / c2.hi);
    out.log_moments[n - 1] = log_acc + 2.0 * n * out.log_unit;
    scaled *= c2;
    if (!(std::isfinite(scaled.hi) && scaled.hi > 1e-290 && scaled.hi < 1e290)) scaled_ok = false;
    if (scaled_ok) out.scaled.push_back(scaled);
    const DoubleDouble inv = DoubleDouble(1.0) / sqrt(c2);
    for (std::size_t i = 0; i < sites; ++i) v[i] = w[i] * inv;
  }
  if (!scaled_ok) out.scaled.clear();
  return out;
}

LanczosSequence lanczos_from_moments(const MomentSequence& mu, Precision precision,
                                     double termination_tolerance) {
  require(mu.normalized, ErrorCode::invalid_argument,
          "lanczos_from_moments needs normalized moments (mu_0 = 1)");
  const std::size_t count = mu.size();
  require(count >= 1, ErrorCode::invalid_argument, "lanczos_from_moments: empty moment sequence");
  const bool extended = precision == Precision::extended;
  auto round = [extended](DoubleDouble x) { return extended ? x : DoubleDouble(x.hi); };

  // m[l] = mu_2l / unit^{2l}, l = 0..count
  double unit = 0.0;
  std::vector<DoubleDouble> m(count + 1);
  m[0] = DoubleDouble(1.0);
  if (mu.scaled.size() == count) {
    unit = mu.log_unit;
    for (std::size_t l = 1; l <= count; ++l) m[l] = round(mu.scaled[l - 1]);
  } else {
    unit = mu.log_moments[count - 1] / (2.0 * count);
    for (std::size_t l = 1; l <= count; ++l)
      m[l] = DoubleDouble(std::exp(mu.log_moments[l - 1] - 2.0 * l * unit));
  }

  LanczosSequence out;
  out.precision_mode = precision;
  out.reorthogonalized = false;
  // M^{(j)}_l = M^{(j-1)}_l / b_{j-1}^2 - M^{(j-2)}_{l-1} / b_{j-2}^2, b_{-1} = b_0 = 1
  std::vector<DoubleDouble> prev2(count + 1), prev(m), cur(count + 1);
  DoubleDouble b2_prev(1.0), b2_prev2(1.0);
  double b2_first = 0.0;
  const double tol2 = termination_tolerance * termination_tolerance;
  for (std::size_t j = 1; j <= count; ++j) {
    for (std::size_t l = j; l <= count; ++l) {
      DoubleDouble x = prev[l] / b2_prev;
      if (j >= 2) x -= prev2[l - 1] / b2_prev2;
      cur[l] = round(x);
    }
    const DoubleDouble b2 = cur[j];
    const double threshold = j == 1 ? 0.0 : tol2 * b2_first;
    if (b2.hi < -threshold || !std::isfinite(b2.hi)) {
      std::ostringstream msg;
      msg << "lanczos_from_moments: b_" << j << "^2 = " << b2.hi
          << " is negative (precision exhausted or moments not a valid sequence)";
      throw Error(ErrorCode::loss_of_positivity, msg.str());
    }
    if (b2.hi <= threshold) {
      out.terminated_at = j;
      break;
    }
    if (j == 1) b2_first = b2.hi;
    out.coefficients.push_back(sqrt(b2).hi * std::exp(unit));
    prev2.swap(prev);
    prev.swap(cur);
    b2_prev2 = b2_prev;
    b2_prev = b2;
  }
  return out;
}

GrowthFit growth_fit(const LanczosSequence& b, std::size_t n_lo, std::size_t n_hi) {
  require(n_lo >= 1 && n_hi <= b.size() && n_hi >= n_lo + 5, ErrorCode::window_too_small,
          "growth_fit window [" + std::to_string(n_lo) + ", " + std::to_string(n_hi) +
              "] needs n_hi - n_lo >= 5 within a sequence of length " + std::to_string(b.size()));
  std::vector<double> x, y, lx, ly;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    const double bn = b.b(n);
    x.push_back(static_cast<double>(n));
    y.push_back(bn);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(bn));
  }
  const LineFit lin = fit_line(x, y);
  const LineFit pow = fit_line(lx, ly);
  GrowthFit f;
  f.alpha = lin.slope;
  f.intercept = lin.intercept;
  f.stderr_alpha = lin.stderr_slope;
  f.r_squared = lin.r_squared;
  f.exponent = pow.slope;
  f.n_lo = n_lo;
  f.n_hi = n_hi;
  if (std::abs(f.exponent - 1.0) > 0.1) {
    std::ostringstream msg;
    msg << "b_n ~ n^" << f.exponent << " over [" << n_lo << ", " << n_hi
        << "]: growth is not linear, the slope alpha is not a growth rate";
    f.warnings.push_back(msg.str());
  }
  return f;
}

std::pair<std::size_t, std::size_t> default_growth_window(const LanczosSequence& b,
                                                          std::size_t width) {
  const std::size_t n = b.size();
  const std::size_t lo = 5;
  require(n >= lo + 5, ErrorCode::window_too_small,
          "default growth window needs at least 10 coefficients");
  width = std::max<std::size_t>(width, 3);
  if (n < lo + width) return {lo, n};
  const double ref = window_slope(b, lo, lo + width - 1);
  if (!(ref > 0.0)) return {lo, n};
  for (std::size_t end = lo + width; end <= n; ++end) {
    if (window_slope(b, end - width + 1, end) < 0.5 * ref) {
      return {lo, std::max(lo + 5, end - width / 2)};
    }
  }
  return {lo, n};
}

GrowthFit growth_fit(const LanczosSequence& b) {
  const auto [lo, hi] = default_growth_window(b);
  return growth_fit(b, lo, hi);
}

SlopeChange detect_slope_change(const LanczosSequence& b, std::size_t n_lo, std::size_t min_segment,
                                double factor) {
  SlopeChange out;
  const std::size_t n = b.size();
  if (n < n_lo + 2 * min_segment) return out;
  for (std::size_t split = n_lo + min_segment; split + min_segment <= n; ++split) {
    const double before = window_slope(b, n_lo, split);
    const double after = window_slope(b, split, split + min_segment);
    if (!(before > 0.0)) continue;
    const double ratio = after / before;
    if (ratio > out.ratio) {
      out.ratio = ratio;
      out.split = split;
      out.slope_before = before;
      out.slope_after = after;
    }
  }
  out.detected = out.ratio > factor;
  return out;
}

}  // namespace opgrowth
