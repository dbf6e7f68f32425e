#pragma once

// Continuum moment predictions, the polylogarithm moments of a harmonic
// spectrum, and the decay-class -> growth-rate diagnostics.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opgrowth/lanczos.hpp"
#include "opgrowth/models.hpp"
#include "opgrowth/spin_chain.hpp"

namespace opgrowth {

struct ContinuumMoments {
  /// mu_2n = 2 int_0^inf w^{2n} e^{-beta w/2} |f(w)|^2 dw, n = 1..n_max (not normalized).
  MomentSequence moments;
  double cutoff = 0.0;
  /// log of the closed form, available for flat and exponential envelopes.
  std::optional<std::vector<double>> log_closed_form;
  double max_relative_deviation = 0.0;
  std::vector<std::string> warnings;
};

/// Quadrature in log space with the integrand peak factored out. Without a cutoff one
/// is chosen where the integrand is 1e-16 of its peak; a supplied cutoff whose tail
/// exceeds 1e-12 of the peak is rejected with cutoff_insufficient.
ContinuumMoments continuum_moments(const StructureSpec& spec, double beta, std::size_t n_max,
                                   std::optional<double> cutoff = std::nullopt);

/// log of 2^{2n+2} (2n)! / (beta + 4 gamma)^{2n+1}; gamma = 0 gives the flat case.
double log_closed_form_moment(std::size_t n, double beta, double gamma = 0.0);

/// Li_{-m}(z) for 0 <= z < 1 via Eulerian numbers.
double polylog_negative(int m, double z);

/// 2 w0^{2n} Li_{-2n}(exp(-beta w0 / 2)).
double polylog_moments(double omega0, double beta, int n);

/// pi/beta for flat and power envelopes, pi/(beta + 4 gamma) for exponential,
/// none for gaussian.
std::optional<double> predict_alpha(const StructureSpec& decay, double beta);

struct GrowthReport {
  bool fitted = false;
  double alpha_fit = 0.0;
  double alpha_stderr = 0.0;
  double exponent = 0.0;
  double r_squared = 0.0;
  std::size_t n_lo = 0, n_hi = 0;
  double alpha_bound = 0.0;
  std::optional<double> alpha_predicted;
  double saturation_ratio = 0.0;
  DecayClass decay_class = DecayClass::flat;
  double decay_parameter = 0.0;
  bool bound_exceeded = false;
  bool prediction_mismatch = false;
  std::vector<std::string> notes;
};

/// `window` defaults to the plateau-aware default growth window.
GrowthReport build_report(const LanczosSequence& b, const StructureSpec& decay, double beta,
                          std::optional<std::pair<std::size_t, std::size_t>> window = std::nullopt,
                          double tolerance = 0.1);
GrowthReport build_report(const LanczosSequence& b, const StructureFunctionFit& fit, double beta,
                          std::optional<std::pair<std::size_t, std::size_t>> window = std::nullopt,
                          double tolerance = 0.1);

}  // namespace opgrowth
