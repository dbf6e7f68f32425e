#pragma once

// Time domain: thermal autocorrelation, spectral moments straight from the
// eigenbasis, and the hopping-chain (Krylov) wavefunction.

#include <cstddef>
#include <string>
#include <vector>

#include "opgrowth/lanczos.hpp"
#include "opgrowth/spectral.hpp"

namespace opgrowth {

/// C(t) = sum_{l != k} w_lk O_lk^2 cos((E_l - E_k) t), divided by C(0) unless `raw`.
/// The diagonal is excluded, as for the Lanczos seed.
std::vector<double> correlation_function(const EigenbasisOperator& op, const Spectrum& spectrum,
                                         const ThermalEnsemble& ens, const std::vector<double>& times,
                                         bool raw = false, FloorPolicy policy = FloorPolicy::zero);

/// mu_2n = sum_{l != k} w_lk (E_l - E_k)^{2n} O_lk^2, n = 1..n_max, divided by mu_0 when
/// `normalize`. Accumulated in double-double with frequencies in units of max |omega|.
MomentSequence moments_direct(const EigenbasisOperator& op, const Spectrum& spectrum,
                              const ThermalEnsemble& ens, std::size_t n_max, bool normalize = true,
                              FloorPolicy policy = FloorPolicy::zero);

enum class ChainMethod { automatic, eigen, chebyshev };

struct ChainOptions {
  ChainMethod method = ChainMethod::automatic;
  /// automatic: eigendecomposition up to this many sites, Chebyshev stepping beyond
  std::size_t eigen_limit = 2000;
  bool auto_extend = true;
  /// Largest |phi_N(t)|^2 allowed on the last site of an open chain.
  double boundary_tolerance = 1e-6;
  std::size_t max_sites = 1u << 17;
};

struct KrylovWavefunction {
  std::vector<double> times;
  /// amplitudes[i][n] = phi_n(times[i])
  std::vector<std::vector<double>> amplitudes;
  std::size_t sites = 0;
  /// Sites n >= padded_from are coupled by extrapolated b_n (0 when none were added).
  std::size_t padded_from = 0;
  double max_norm_error = 0.0;
  double max_boundary_occupancy = 0.0;
  std::vector<std::string> warnings;
};

/// Solves d phi_n/dt = -b_{n+1} phi_{n+1} + b_n phi_{n-1}, phi_n(0) = delta_{n0}.
/// A terminated sequence is a closed chain; an open one is extended by linear
/// extrapolation of b_n until the last-site occupancy stays below tolerance.
KrylovWavefunction propagate_chain(const LanczosSequence& b, const std::vector<double>& times,
                                   const ChainOptions& options = {});

/// C_K(t) = sum_n n phi_n(t)^2.
std::vector<double> krylov_complexity(const KrylovWavefunction& phi);

}  // namespace opgrowth
