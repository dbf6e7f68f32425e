#pragma once

// Periodic XXZ chain with nearest and next-nearest couplings in a fixed
// magnetization sector, the flip-flop observable, and empirical structure
// functions of eigenbasis operators.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opgrowth/models.hpp"
#include "opgrowth/spectral.hpp"

namespace opgrowth {

struct ChainConfig {
  int sites = 12;
  double j1 = 1.0;
  double j2 = 0.0;
  double delta1 = 0.55;
  double delta2 = 0.5;
  /// Total S_z; the sector holds sites/2 + sz up spins.
  int sz = 0;

  void validate() const;
  int up_spins() const { return sites / 2 + sz; }
};

/// Sorted bitstrings (bit i set = spin up on site i) of the magnetization sector.
std::vector<std::uint32_t> sector_basis(const ChainConfig& cfg);

/// H = J1 sum_i (Sx Sx + Sy Sy + D1 Sz Sz)_{i,i+1} + J2 sum_i (...)_{i,i+2}, S = sigma/2,
/// periodic. Each periodic bond is summed literally, so at L = 2 (L = 4 for J2)
/// bonds appear twice.
Matrix build_hamiltonian(const ChainConfig& cfg);

/// B = (1/L) sum_i (S+_i S-_{i+2} + S-_i S+_{i+2}), periodic.
Matrix flip_flop_operator(const ChainConfig& cfg);

/// One-site translation as a permutation matrix on the sector basis.
Matrix translation_operator(const ChainConfig& cfg);

struct ChainEigenbasis {
  Spectrum spectrum;
  EigenbasisOperator op;
  Matrix vectors;  // columns are eigenvectors of H
  std::vector<std::string> warnings;
};

/// H = V E V^T; returns E and V^T B V (symmetrized exactly).
ChainEigenbasis diagonalize_to_eigenbasis(const Matrix& h, const Matrix& b);

struct StructureBin {
  double omega = 0.0;  // bin centre
  double rms = 0.0;    // sqrt(mean |O_lk|^2)
  std::size_t count = 0;
};

struct LawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct StructureFunctionFit {
  std::vector<StructureBin> bins;
  double ebar_lo = 0.0, ebar_hi = 0.0;
  double bin_width = 0.0;
  std::size_t pairs = 0;
  /// Bins [tail_begin, tail_end) entered the fits.
  std::size_t tail_begin = 0, tail_end = 0;
  DecayClass classified = DecayClass::flat;
  /// gamma, sigma or a for the chosen class.
  double parameter = 0.0;
  /// log rms against omega, omega^2 and log omega.
  LawFit exponential, gaussian, power;
  /// Local exponential decay rates over the lower and upper half of the tail.
  double lower_rate = 0.0, upper_rate = 0.0;
  /// Gaussian tail whose decay rate at least doubles across it.
  bool crossover = false;
  std::vector<std::string> warnings;

  StructureSpec spec() const { return {classified, parameter}; }
};

struct StructureOptions {
  /// Ebar window; defaults to the central 20% of the spectrum.
  std::optional<double> ebar_lo, ebar_hi;
  /// <= 0 selects max(10 x mean level spacing in the window, omega_max / 40).
  double bin_width = 0.0;
  /// Classification ties within this R^2 margin go to the exponential law.
  double tie_tolerance = 1e-3;
  std::size_t min_pairs = 100;
};

StructureFunctionFit extract_structure_function(const EigenbasisOperator& op, const Spectrum& spectrum,
                                                const StructureOptions& options = {});

/// Restrict spectrum and operator to the lowest keep_n eigenstates.
ModelData truncate_operator(const EigenbasisOperator& op, const Spectrum& spectrum, std::size_t keep_n);

}  // namespace opgrowth
