#include "opgrowth/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "linalg.hpp"

namespace opgrowth {

namespace {

// Independent of beta: only the packed amplitudes and frequencies are used.
BohrAtoms atoms_for(const EigenbasisOperator& op, const Spectrum& spectrum, const ThermalEnsemble& ens,
                    FloorPolicy policy) {
  BohrAtoms atoms = pack_off_diagonal(op, spectrum, ens, policy);
  require(atoms.size() > 0, ErrorCode::zero_norm, "operator has no off-diagonal weight");
  return atoms;
}

using Coefficients = std::vector<double>;

std::vector<std::vector<double>> propagate_eigen(const Coefficients& b, const std::vector<double>& times) {
  const std::size_t n = b.size() + 1;
  std::vector<double> diag(n, 0.0);
  const linalg::EigenPairs ep = linalg::tridiagonal_eigen(diag, b);
  const Matrix& v = ep.vectors;
  const Vector v0 = v.row(0).transpose();
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  Vector c(n), s(n);
  for (double t : times) {
    for (std::size_t k = 0; k < n; ++k) {
      c[k] = v0[k] * std::cos(ep.values[k] * t);
      s[k] = v0[k] * std::sin(ep.values[k] * t);
    }
    const Vector even = v * c;
    const Vector odd = v * s;
    std::vector<double> phi(n);
    // phi_n = i^n psi_n with psi = exp(-i T t) e_0; the chain is bipartite so phi is real
    for (std::size_t m = 0; m < n; ++m) {
      const double sign = ((m / 2) % 2 == 0) ? 1.0 : -1.0;
      phi[m] = sign * (m % 2 == 0 ? even[m] : odd[m]);
    }
    out.push_back(std::move(phi));
  }
  return out;
}

// phi' = sum_k (2 - delta_k0) J_k(R dt) P_k(B) phi with B = A / R, A the real chain
// generator and P_{k+1} = 2x P_k + P_{k-1}.
class ChebyshevStepper {
 public:
  explicit ChebyshevStepper(const Coefficients& b) : b_(b), n_(b.size() + 1) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double left = i > 0 ? b_[i - 1] : 0.0;
      const double right = i + 1 < n_ ? b_[i] : 0.0;
      radius_ = std::max(radius_, left + right);
    }
    if (radius_ == 0.0) radius_ = 1.0;
  }

  void advance(std::vector<double>& phi, double dt) {
    if (dt == 0.0) return;
    const int substeps = std::max(1, static_cast<int>(std::ceil(radius_ * dt / kMaxArgument)));
    const double h = dt / substeps;
    const std::vector<double>& coeff = coefficients(radius_ * h);
    for (int s = 0; s < substeps; ++s) step(phi, coeff);
  }

 private:
  static constexpr double kMaxArgument = 20.0;

  const std::vector<double>& coefficients(double x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    std::vector<double> c;
    for (int k = 0;; ++k) {
      const double j = std::cyl_bessel_j(static_cast<double>(k), x);
      c.push_back(k == 0 ? j : 2.0 * j);
      if (k > x && std::abs(j) < 1e-18) break;
    }
    return cache_.emplace(x, std::move(c)).first->second;
  }

  void apply(const std::vector<double>& v, std::vector<double>& out) const {
    const double inv = 1.0 / radius_;
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      if (i > 0) acc += b_[i - 1] * v[i - 1];
      if (i + 1 < n_) acc -= b_[i] * v[i + 1];
      out[i] = acc * inv;
    }
  }

  void step(std::vector<double>& phi, const std::vector<double>& c) {
    prev_.assign(phi.begin(), phi.end());
    cur_.resize(n_);
    next_.resize(n_);
    acc_.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) acc_[i] = c[0] * prev_[i];
    if (c.size() > 1) {
      apply(prev_, cur_);
      for (std::size_t i = 0; i < n_; ++i) acc_[i] += c[1] * cur_[i];
    }
    for (std::size_t k = 2; k < c.size(); ++k) {
      apply(cur_, next_);
      for (std::size_t i = 0; i < n_; ++i) {
        next_[i] = 2.0 * next_[i] + prev_[i];
        acc_[i] += c[k] * next_[i];
      }
      prev_.swap(cur_);
      cur_.swap(next_);
    }
    phi.swap(acc_);
  }

  const Coefficients& b_;
  std::size_t n_;
  double radius_ = 0.0;
  std::map<double, std::vector<double>> cache_;
  std::vector<double> prev_, cur_, next_, acc_;
};

std::vector<std::vector<double>> propagate_chebyshev(const Coefficients& b,
                                                     const std::vector<double>& times) {
  const std::size_t n = b.size() + 1;
  ChebyshevStepper stepper(b);
  std::vector<double> phi(n, 0.0);
  phi[0] = 1.0;
  double t_now = 0.0;
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  for (double t : times) {
    stepper.advance(phi, t - t_now);
    t_now = t;
    out.push_back(phi);
  }
  return out;
}

}  // namespace

std::vector<double> correlation_function(const EigenbasisOperator& op, const Spectrum& spectrum,
                                         const ThermalEnsemble& ens, const std::vector<double>& times,
                                         bool raw, FloorPolicy policy) {
  const BohrAtoms atoms = atoms_for(op, spectrum, ens, policy);
  const double norm2 = atoms.norm_squared(Precision::extended);
  const double factor = raw ? atoms.scale * atoms.scale : 1.0 / norm2;
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    Accumulator acc(true);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      acc.add_product(atoms.amplitude[i] * atoms.amplitude[i], std::cos(atoms.omega[i] * t));
    }
    out.push_back(acc.value() * factor);
  }
  return out;
}

MomentSequence moments_direct(const EigenbasisOperator& op, const Spectrum& spectrum,
                              const ThermalEnsemble& ens, std::size_t n_max, bool normalize,
                              FloorPolicy policy) {
  require(n_max >= 1, ErrorCode::invalid_argument, "n_max must be >= 1");
  const BohrAtoms atoms = atoms_for(op, spectrum, ens, policy);
  const std::size_t m = atoms.size();
  double omega_max = 0.0;
  for (double w : atoms.omega) omega_max = std::max(omega_max, w);
  require(omega_max > 0.0, ErrorCode::zero_norm,
          "all off-diagonal weight sits on degenerate pairs; the operator is static");

  std::vector<double> weight(m), ratio(m);
  for (std::size_t i = 0; i < m; ++i) {
    weight[i] = atoms.amplitude[i] * atoms.amplitude[i];
    const double r = atoms.omega[i] / omega_max;
    ratio[i] = r * r;
  }
  Accumulator acc0(true);
  for (double w : weight) acc0.add(w);
  const DoubleDouble s0 = acc0.extended_value();

  MomentSequence out;
  out.normalized = normalize;
  out.log_unit = std::log(omega_max);
  const DoubleDouble mu0 = DoubleDouble(atoms.scale) * DoubleDouble(atoms.scale) * s0;
  const double log_mu0 = std::log(mu0.hi);
  for (std::size_t n = 1; n <= n_max; ++n) {
    Accumulator acc(true);
    for (std::size_t i = 0; i < m; ++i) {
      weight[i] *= ratio[i];
      acc.add(weight[i]);
    }
    const DoubleDouble rel = acc.extended_value() / s0;
    require(rel.hi > 0.0, ErrorCode::zero_norm, "moment underflow in moments_direct");
    out.scaled.push_back(normalize ? rel : rel * mu0);
    out.log_moments.push_back(std::log(rel.hi) + 2.0 * n * out.log_unit + (normalize ? 0.0 : log_mu0));
  }
  return out;
}

KrylovWavefunction propagate_chain(const LanczosSequence& b, const std::vector<double>& times,
                                   const ChainOptions& options) {
  require(!times.empty(), ErrorCode::invalid_argument, "propagate_chain: empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]) && times[i] >= 0.0 && (i == 0 || times[i] >= times[i - 1]),
            ErrorCode::invalid_argument, "propagate_chain: times must be finite, >= 0 and non-decreasing");
  }
  const bool closed = b.terminated_at.has_value();
  require(closed || !b.coefficients.empty(), ErrorCode::invalid_argument,
          "propagate_chain: open chain without coefficients");

  Coefficients coeffs = b.coefficients;
  // linear continuation of b_n for padding sites
  double slope = 0.0, intercept = coeffs.empty() ? 0.0 : coeffs.back();
  if (!closed && coeffs.size() >= 10) {
    const GrowthFit fit = growth_fit(b);
    if (fit.alpha > 0.0) {
      slope = fit.alpha;
      intercept = fit.intercept;
    }
  }
  const double last = coeffs.empty() ? 0.0 : coeffs.back();
  auto extrapolate = [&](std::size_t n) { return std::max(intercept + slope * static_cast<double>(n), last); };

  KrylovWavefunction out;
  out.times = times;
  for (;;) {
    const std::size_t sites = coeffs.size() + 1;
    const bool use_eigen = options.method == ChainMethod::eigen ||
                           (options.method == ChainMethod::automatic && sites <= options.eigen_limit);
    out.amplitudes = use_eigen ? propagate_eigen(coeffs, times) : propagate_chebyshev(coeffs, times);
    out.sites = sites;

    double edge = 0.0;
    for (const auto& phi : out.amplitudes) edge = std::max(edge, phi.back() * phi.back());
    out.max_boundary_occupancy = edge;
    if (closed || edge < options.boundary_tolerance) break;

    if (!options.auto_extend || sites >= options.max_sites) {
      std::ostringstream msg;
      msg << "propagate_chain: occupancy " << edge << " reaches the last of " << sites
          << " sites; boundary reflections corrupt the solution";
      throw Error(ErrorCode::boundary_leak, msg.str());
    }
    if (out.padded_from == 0) out.padded_from = coeffs.size() + 1;
    const std::size_t target = std::min(options.max_sites, 2 * sites) - 1;
    while (coeffs.size() < target) coeffs.push_back(extrapolate(coeffs.size() + 1));
  }

  for (const auto& phi : out.amplitudes) {
    double norm = 0.0;
    for (double x : phi) norm += x * x;
    out.max_norm_error = std::max(out.max_norm_error, std::abs(norm - 1.0));
  }
  if (out.padded_from > 0) {
    std::ostringstream msg;
    msg << "chain extended from " << out.padded_from << " to " << out.sites
        << " sites with linearly extrapolated b_n";
    out.warnings.push_back(msg.str());
  }
  if (out.max_norm_error > 1e-8) {
    std::ostringstream msg;
    msg << "norm drift " << out.max_norm_error << " exceeds 1e-8";
    out.warnings.push_back(msg.str());
  }
  return out;
}

std::vector<double> krylov_complexity(const KrylovWavefunction& phi) {
  std::vector<double> out;
  out.reserve(phi.amplitudes.size());
  for (const auto& amp : phi.amplitudes) {
    double acc = 0.0;
    for (std::size_t n = 0; n < amp.size(); ++n) acc += static_cast<double>(n) * amp[n] * amp[n];
    out.push_back(acc);
  }
  return out;
}

}  // namespace opgrowth
