#pragma once

// Builders producing (Spectrum, EigenbasisOperator) pairs for the catalogue of
// single-particle and random-matrix models, plus the semiclassical estimates
// for V(x) = x^p.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opgrowth/spectral.hpp"

namespace opgrowth {

struct ModelData {
  Spectrum spectrum;
  EigenbasisOperator op;
  std::vector<std::string> warnings;
};

enum class DecayClass { flat, power, exponential, gaussian };

std::string_view to_string(DecayClass c) noexcept;
DecayClass parse_decay_class(std::string_view s);

/// Envelope f(omega) of the off-diagonal elements as a function of |omega|.
struct StructureSpec {
  DecayClass decay = DecayClass::flat;
  /// power: exponent a; exponential: rate gamma; gaussian: width sigma; flat: unused.
  double parameter = 0.0;

  static StructureSpec flat() { return {DecayClass::flat, 0.0}; }
  static StructureSpec power(double a) { return {DecayClass::power, a}; }
  static StructureSpec exponential(double gamma) { return {DecayClass::exponential, gamma}; }
  static StructureSpec gaussian(double sigma) { return {DecayClass::gaussian, sigma}; }

  void validate() const;
  double envelope(double omega) const;
  /// log f(omega); finite even where f underflows.
  double log_envelope(double omega) const;
};

// --- harmonic oscillator -------------------------------------------------

/// x_{k+1,k} = sqrt(1/(2 m w)) sqrt(k+1), E_k = w (k + 1/2).
ModelData harmonic_position(std::size_t dim, double mass = 1.0, double omega = 1.0);

/// (x^q) truncated to dim x dim; built in a basis of size dim + q so the block is exact.
EigenbasisOperator harmonic_power(std::size_t dim, int q, double mass = 1.0, double omega = 1.0);

/// [u^q]_{lk} for the 0/1 tridiagonal u, from the closed three-case binomial formula.
double uq_binomial_element(int q, long l, long k);
EigenbasisOperator uq_binomial(std::size_t dim, int q);

/// Stirling bulk estimate 2^q sqrt(2/(pi q)) exp(-(l-k)^2 / (2q)).
double gaussian_decay_estimate(int q, long l, long k);

// --- infinite wells -------------------------------------------------------

/// Particle in [0, L]; position measured from the centre, elements
/// L * 8nm / (pi^2 (n^2 - m^2)^2) for n + m odd (quantum numbers from 1).
ModelData box_position_1d(std::size_t dim, double length, double mass = 1.0);

/// Product basis of two 1-D wells sorted by energy; operator is x (x) 1.
/// `labels[i]` holds the (n_x, n_y) quantum numbers of eigenstate i.
struct Box2dData : ModelData {
  std::vector<std::array<int, 2>> labels;
};
Box2dData box_position_2d(std::array<std::size_t, 2> dims, std::array<double, 2> lengths,
                          double mass = 1.0);

// --- V(x) = x^p -----------------------------------------------------------

struct AnharmonicConfig {
  int p = 4;
  int grid_points = 4096;
  /// Half-width of the box [-a, a]; defaults to 1.5 x the outer turning point of
  /// the highest requested state.
  std::optional<double> grid_halfwidth;
  double mass = 1.0;
  int n_states = 50;
  /// Elements below floor_rel * max|x_lk| are flagged as round-off dominated.
  double floor_rel = 1e-13;
  double boundary_tolerance = 1e-10;
};

struct AnharmonicData : ModelData {
  double halfwidth = 0.0;
  double boundary_amplitude = 0.0;
};

/// Finite-difference solve of -(1/2m) psi'' + x^p psi = E psi with Dirichlet walls.
AnharmonicData anharmonic_solve(const AnharmonicConfig& cfg);

/// G(p) = Gamma(1 + 1/p) Gamma(3/2) / Gamma(1/p + 3/2).
double bohr_sommerfeld_g(int p);
/// Bohr-Sommerfeld level E_n for V = x^p.
double bohr_sommerfeld_energy(int p, double n, double mass = 1.0);

/// I(u) = int_{u^{1/p}}^inf dx sqrt(m) / sqrt(2 (x^p - u)), closed form via Gamma functions.
double tunnelling_integrand(int p, double u, double mass = 1.0);
/// Same integral by direct quadrature over x.
double tunnelling_integrand_quadrature(int p, double u, double mass = 1.0);

/// Decay rate J(p) in L_nm = J(p) |n - m| for Bohr-Sommerfeld levels.
double semiclassical_rate(int p, double mass = 1.0);

struct SemiclassicalLog {
  double closed_form = 0.0;
  double quadrature = 0.0;
  double relative_difference() const;
};

/// L_nm computed in closed form and by nested quadrature (outer over energy,
/// inner over position). Rejects p = 2, where Gamma((p-2)/2p) has a pole.
SemiclassicalLog semiclassical_log_element(int p, int n, int m, double mass = 1.0);

/// prefactor * exp(-L_lk) on |l - k| odd with Bohr-Sommerfeld energies.
/// When `exact_nearest` is given, the |l - k| = 1 entries are copied from it.
ModelData semiclassical_operator(int p, std::size_t dim, double mass, double prefactor,
                                 const EigenbasisOperator* exact_nearest = nullptr);

// --- random-matrix ensembles ----------------------------------------------

/// Equally spaced levels on [0, bandwidth] and O_lk = f(|E_l - E_k|) R_lk / sqrt(dim),
/// R symmetric standard normal. Deterministic in `seed`.
ModelData random_ensemble(std::size_t dim, const StructureSpec& spec, double bandwidth,
                          std::uint64_t seed);

}  // namespace opgrowth
