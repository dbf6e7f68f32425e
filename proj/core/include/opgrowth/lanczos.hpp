#pragma once

// Lanczos recursion in Liouville space under the Wightman inner product,
// the moment <-> coefficient maps, and growth-rate fits of b_n.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opgrowth/dd.hpp"
#include "opgrowth/spectral.hpp"

namespace opgrowth {

struct LanczosOptions {
  bool reorthogonalize = true;
  Precision precision = Precision::standard;
  FloorPolicy floor_policy = FloorPolicy::zero;
  /// Relative to b_1.
  double termination_tolerance = 1e-10;
  /// Keep the Krylov vectors (packed) in the detailed result.
  bool keep_basis = false;
};

struct LanczosSequence {
  std::vector<double> coefficients;  // b_1 .. b_N
  /// Index n of the first b_n below tolerance; that b_n is not stored.
  std::optional<std::size_t> terminated_at;
  Precision precision_mode = Precision::standard;
  bool reorthogonalized = true;
  /// Thermal norm of the stripped seed, divided out before the recursion.
  double seed_norm = 1.0;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return coefficients.size(); }
  /// b_n with 1-based n.
  double b(std::size_t n) const { return coefficients.at(n - 1); }
};

/// Even moments mu_2n, n = 1..N, of the spectral function (mu_0 = 1 when normalized).
///
/// `log_moments` is always valid. When the producer knows the moments to better
/// than double precision it also fills `scaled`, with
/// mu_2n = scaled[n-1] * exp(2 n log_unit).
struct MomentSequence {
  std::vector<double> log_moments;
  bool normalized = true;
  double log_unit = 0.0;
  std::vector<DoubleDouble> scaled;

  std::size_t size() const noexcept { return log_moments.size(); }
  double moment(std::size_t n) const;  // mu_2n, 1-based
  /// log mu_{2n+2} + log mu_{2n-2} >= 2 log mu_2n within `slack` (mu_0 = 1).
  bool log_convex(double slack = 1e-10) const;
};

/// Moments from raw values (double precision only).
MomentSequence moments_from_values(const std::vector<double>& mu, bool normalized = true);

struct LanczosRun {
  LanczosSequence sequence;
  /// Packed layout of the seed; basis[n] holds the amplitudes of O_n in that layout.
  BohrAtoms atoms;
  std::vector<std::vector<double>> basis;
};

LanczosRun lanczos_run_detailed(const EigenbasisOperator& seed, const Spectrum& spectrum,
                                const ThermalEnsemble& ens, std::size_t n_max,
                                const LanczosOptions& options = {});

LanczosSequence lanczos_run(const EigenbasisOperator& seed, const Spectrum& spectrum,
                            const ThermalEnsemble& ens, std::size_t n_max,
                            const LanczosOptions& options = {});

/// Dense Liouville vector of Krylov element n from a run with keep_basis.
LiouvilleVector krylov_vector(const LanczosRun& run, std::size_t n, const ThermalEnsemble& ens);

/// mu_2n = (T^{2n})_00 = |T^n e_0|^2 for n = 1..n_moments (default: one per coefficient).
/// A terminated sequence is a closed chain, so any number of moments is exact.
MomentSequence moments_from_lanczos(const LanczosSequence& b,
                                    std::optional<std::size_t> n_moments = std::nullopt,
                                    Precision precision = Precision::extended);

/// Inverse map by the Hankel-determinant recursion. Unstable in double precision
/// beyond n ~ 20. Throws loss_of_positivity when an intermediate b_n^2 goes negative.
LanczosSequence lanczos_from_moments(const MomentSequence& mu,
                                     Precision precision = Precision::extended,
                                     double termination_tolerance = 1e-10);

struct GrowthFit {
  double alpha = 0.0;      // slope of b_n vs n
  double intercept = 0.0;
  double stderr_alpha = 0.0;
  double exponent = 0.0;   // delta in b_n ~ n^delta
  double r_squared = 0.0;
  std::size_t n_lo = 0, n_hi = 0;
  std::vector<std::string> warnings;
};

/// Least-squares fits over n in [n_lo, n_hi] (1-based, inclusive); needs n_hi - n_lo >= 5.
GrowthFit growth_fit(const LanczosSequence& b, std::size_t n_lo, std::size_t n_hi);

/// Skips n <= 4 and stops before the first plateau, detected as a rolling slope
/// (width `width`) below half the initial slope.
std::pair<std::size_t, std::size_t> default_growth_window(const LanczosSequence& b,
                                                          std::size_t width = 6);
GrowthFit growth_fit(const LanczosSequence& b);

/// Upward kink in b_n: the slope after some split exceeds `factor` times the slope before.
struct SlopeChange {
  bool detected = false;
  std::size_t split = 0;
  double slope_before = 0.0;
  double slope_after = 0.0;
  double ratio = 0.0;  // largest after/before over the scanned splits
};

SlopeChange detect_slope_change(const LanczosSequence& b, std::size_t n_lo = 5,
                                std::size_t min_segment = 8, double factor = 1.5);

}  // namespace opgrowth
