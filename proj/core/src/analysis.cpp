#include "opgrowth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "quadrature.hpp"

namespace opgrowth {

namespace {

// log of the integrand 2 w^{2n} e^{-beta w/2} |f|^2 without the factor 2
double log_integrand(const StructureSpec& spec, double beta, std::size_t n, double w) {
  if (w <= 0.0) return n == 0 ? 2.0 * spec.log_envelope(0.0) : -INFINITY;
  return 2.0 * n * std::log(w) - 0.5 * beta * w + 2.0 * spec.log_envelope(w);
}

}  // namespace

double log_closed_form_moment(std::size_t n, double beta, double gamma) {
  const double rate = beta + 4.0 * gamma;
  return (2.0 * n + 2.0) * std::log(2.0) + std::lgamma(2.0 * n + 1.0) - (2.0 * n + 1.0) * std::log(rate);
}

ContinuumMoments continuum_moments(const StructureSpec& spec, double beta, std::size_t n_max,
                                   std::optional<double> cutoff) {
  spec.validate();
  require(beta >= 0.0, ErrorCode::invalid_argument, "beta must be >= 0");
  require(n_max >= 1, ErrorCode::invalid_argument, "n_max must be >= 1");
  const bool decays = beta > 0.0 || spec.decay == DecayClass::exponential ||
                      spec.decay == DecayClass::gaussian;
  require(decays, ErrorCode::cutoff_insufficient,
          "integrand does not decay (beta = 0 with a flat or power-law envelope)");

  ContinuumMoments out;
  out.moments.normalized = false;

  // the largest n has the widest integrand; size the default cutoff on it
  auto tail_cutoff = [&](std::size_t n) {
    double peak = -INFINITY, w = 1e-3;
    for (double x = 1e-3; x < 1e7; x *= 1.01) {
      const double h = log_integrand(spec, beta, n, x);
      if (h > peak) {
        peak = h;
        w = x;
      }
    }
    while (log_integrand(spec, beta, n, w) > peak + std::log(1e-16) && w < 1e8) w *= 1.05;
    return w;
  };
  out.cutoff = cutoff.value_or(tail_cutoff(n_max));
  require(out.cutoff > 0.0, ErrorCode::invalid_argument, "cutoff must be > 0");

  for (std::size_t n = 1; n <= n_max; ++n) {
    // locate the peak on a log grid, then integrate exp(h - h_peak) piecewise
    double peak = -INFINITY, w_peak = 0.0;
    const double lo = out.cutoff * 1e-9;
    for (double x = lo; x <= out.cutoff; x *= 1.005) {
      const double h = log_integrand(spec, beta, n, x);
      if (h > peak) {
        peak = h;
        w_peak = x;
      }
    }
    const double at_cut = log_integrand(spec, beta, n, out.cutoff);
    if (at_cut > peak + std::log(1e-12)) {
      std::ostringstream msg;
      msg << "cutoff " << out.cutoff << " truncates the n=" << n << " integrand at "
          << std::exp(at_cut - peak) << " of its peak";
      throw Error(ErrorCode::cutoff_insufficient, msg.str());
    }
    auto g = [&](double x) { return std::exp(log_integrand(spec, beta, n, x) - peak); };
    // split so each panel sees a unimodal, moderately scaled piece
    std::vector<double> knots{0.0};
    for (double f : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0})
      if (w_peak * f < out.cutoff) knots.push_back(w_peak * f);
    knots.push_back(out.cutoff);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      if (knots[i + 1] > knots[i]) total += quad::finite(g, knots[i], knots[i + 1], 1e-14);
    out.moments.log_moments.push_back(std::log(2.0) + peak + std::log(total));
  }

  if (spec.decay == DecayClass::flat || spec.decay == DecayClass::exponential) {
    const double gamma = spec.decay == DecayClass::exponential ? spec.parameter : 0.0;
    std::vector<double> closed;
    for (std::size_t n = 1; n <= n_max; ++n) {
      closed.push_back(log_closed_form_moment(n, beta, gamma));
      const double rel = std::abs(std::expm1(out.moments.log_moments[n - 1] - closed.back()));
      out.max_relative_deviation = std::max(out.max_relative_deviation, rel);
    }
    out.log_closed_form = std::move(closed);
    if (out.max_relative_deviation > 1e-8) {
      std::ostringstream msg;
      msg << "quadrature deviates from the closed form by " << out.max_relative_deviation;
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

double polylog_negative(int m, double z) {
  require(m >= 0, ErrorCode::invalid_argument, "polylog_negative needs m >= 0");
  require(z >= 0.0 && z < 1.0, ErrorCode::invalid_argument, "polylog_negative needs 0 <= z < 1");
  if (m == 0) return z / (1.0 - z);
  // Eulerian numbers A(m, k), k = 0..m-1
  std::vector<double> a{1.0};
  for (int row = 2; row <= m; ++row) {
    std::vector<double> next(row, 0.0);
    for (int k = 0; k < row; ++k) {
      const double keep = k < row - 1 ? (k + 1.0) * a[k] : 0.0;
      const double shift = k > 0 ? (row - k) * a[k - 1] : 0.0;
      next[k] = keep + shift;
    }
    a = std::move(next);
  }
  double poly = 0.0;
  for (int k = m - 1; k >= 0; --k) poly = poly * z + a[k];
  return z * poly / std::pow(1.0 - z, m + 1);
}

double polylog_moments(double omega0, double beta, int n) {
  require(omega0 > 0.0 && beta > 0.0 && n >= 0, ErrorCode::invalid_argument,
          "polylog_moments needs omega0 > 0, beta > 0, n >= 0");
  return 2.0 * std::pow(omega0, 2 * n) * polylog_negative(2 * n, std::exp(-0.5 * beta * omega0));
}

std::optional<double> predict_alpha(const StructureSpec& decay, double beta) {
  require(beta > 0.0, ErrorCode::invalid_argument, "predict_alpha needs beta > 0");
  switch (decay.decay) {
    case DecayClass::flat:
    case DecayClass::power: return std::numbers::pi / beta;
    case DecayClass::exponential: return std::numbers::pi / (beta + 4.0 * decay.parameter);
    case DecayClass::gaussian: return std::nullopt;
  }
  return std::nullopt;
}

GrowthReport build_report(const LanczosSequence& b, const StructureSpec& decay, double beta,
                          std::optional<std::pair<std::size_t, std::size_t>> window, double tolerance) {
  require(beta > 0.0, ErrorCode::invalid_argument, "build_report needs beta > 0");
  GrowthReport r;
  r.alpha_bound = std::numbers::pi / beta;
  r.decay_class = decay.decay;
  r.decay_parameter = decay.parameter;
  r.alpha_predicted = predict_alpha(decay, beta);
  if (b.terminated_at) {
    r.notes.push_back("Lanczos sequence terminated at n=" + std::to_string(*b.terminated_at));
  }

  std::optional<GrowthFit> fit;
  try {
    fit = window ? growth_fit(b, window->first, window->second) : growth_fit(b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::window_too_small) throw;
    r.notes.push_back(std::string("no growth fit: ") + e.what());
  }
  if (!fit) return r;

  r.fitted = true;
  r.alpha_fit = fit->alpha;
  r.alpha_stderr = fit->stderr_alpha;
  r.exponent = fit->exponent;
  r.r_squared = fit->r_squared;
  r.n_lo = fit->n_lo;
  r.n_hi = fit->n_hi;
  r.saturation_ratio = r.alpha_fit / r.alpha_bound;
  for (const auto& w : fit->warnings) r.notes.push_back(w);

  std::ostringstream msg;
  if (r.alpha_fit > r.alpha_bound + 2.0 * r.alpha_stderr) {
    r.bound_exceeded = true;
    msg << "fitted alpha " << r.alpha_fit << " exceeds the bound pi/beta = " << r.alpha_bound;
    r.notes.push_back(msg.str());
    msg.str("");
  }
  if (r.alpha_predicted) {
    const double rel = std::abs(r.alpha_fit - *r.alpha_predicted) / *r.alpha_predicted;
    if (rel > tolerance) {
      r.prediction_mismatch = true;
      msg << "fitted alpha " << r.alpha_fit << " differs from the predicted " << *r.alpha_predicted
          << " by " << rel * 100.0 << "%";
      r.notes.push_back(msg.str());
    }
  } else if (r.exponent >= 0.9) {
    r.prediction_mismatch = true;
    msg << "gaussian envelope predicts sub-linear b_n but the log-log exponent is " << r.exponent;
    r.notes.push_back(msg.str());
  }
  return r;
}

GrowthReport build_report(const LanczosSequence& b, const StructureFunctionFit& fit, double beta,
                          std::optional<std::pair<std::size_t, std::size_t>> window, double tolerance) {
  return build_report(b, fit.spec(), beta, window, tolerance);
}

}  // namespace opgrowth
