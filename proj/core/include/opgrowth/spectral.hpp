#pragma once

// Spectral core: energy eigenbasis types, the Wightman (thermally split)
// inner product on operator space and the Liouvillian [H, .].
// Conventions: hbar = k_B = 1; all operators real.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "opgrowth/error.hpp"

namespace opgrowth {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class Precision { standard, extended };
enum class FloorPolicy { zero, keep };

std::string_view to_string(Precision p) noexcept;
std::string_view to_string(FloorPolicy p) noexcept;
Precision parse_precision(std::string_view s);
FloorPolicy parse_floor_policy(std::string_view s);

/// Ordered energy eigenvalues.
class Spectrum {
 public:
  Spectrum() = default;
  /// Throws invalid_argument unless `energies` is non-empty and non-decreasing.
  explicit Spectrum(std::vector<double> energies);

  std::size_t dimension() const noexcept { return energies_.size(); }
  const std::vector<double>& energies() const noexcept { return energies_; }
  double operator[](std::size_t i) const { return energies_[i]; }
  double ground() const { return energies_.front(); }
  double top() const { return energies_.back(); }

 private:
  std::vector<double> energies_;
};

/// Dense real matrix of an observable in the energy eigenbasis.
///
/// Elements computed on a grid may carry a "below precision floor" mask;
/// the Lanczos engine either zeroes flagged entries or keeps them.
class EigenbasisOperator {
 public:
  EigenbasisOperator() = default;
  explicit EigenbasisOperator(Matrix elements, bool hermitian = true);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(elements_.rows()); }
  const Matrix& elements() const noexcept { return elements_; }
  bool hermitian() const noexcept { return hermitian_; }
  double operator()(Eigen::Index l, Eigen::Index k) const { return elements_(l, k); }

  void set_below_floor(Mask mask);
  const std::optional<Mask>& below_floor() const noexcept { return below_floor_; }
  std::size_t below_floor_count() const;

 private:
  Matrix elements_;
  bool hermitian_ = true;
  std::optional<Mask> below_floor_;
};

/// Inverse temperature with the Wightman weights w_lk = exp(-beta (E_l+E_k)/2) / Z.
///
/// Weights are stored factorised, w_lk = h_l h_k, with energies shifted by the
/// ground-state energy so that neither Z nor the weights overflow.
class ThermalEnsemble {
 public:
  ThermalEnsemble(const Spectrum& spectrum, double beta);

  double beta() const noexcept { return beta_; }
  double log_z() const noexcept { return log_z_; }
  double z() const;
  std::size_t dimension() const noexcept { return half_.size(); }

  double weight(std::size_t l, std::size_t k) const { return half_[l] * half_[k]; }
  /// sqrt(w_lk) = root(l) * root(k); stays representable when w_lk would underflow.
  double root(std::size_t l) const { return root_[l]; }
  Matrix weights() const;

 private:
  double beta_;
  double log_z_;
  std::vector<double> half_;
  std::vector<double> root_;
};

/// An operator viewed as a vector in Liouville space.
struct LiouvilleVector {
  Matrix amplitudes;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes.rows()); }
  static LiouvilleVector identity(std::size_t dim);
  static LiouvilleVector from(const EigenbasisOperator& op) { return {op.elements()}; }
};

double thermal_inner(const LiouvilleVector& a, const LiouvilleVector& b,
                     const ThermalEnsemble& ens, Precision precision = Precision::standard);
double thermal_norm(const LiouvilleVector& a, const ThermalEnsemble& ens,
                    Precision precision = Precision::standard);

/// (L a)_lk = (E_l - E_k) a_lk.
LiouvilleVector liouville_apply(const LiouvilleVector& a, const Spectrum& spectrum);

/// Scales `a` to unit thermal norm; throws zero_norm for a static (diagonal or null) input.
LiouvilleVector normalize(const LiouvilleVector& a, const ThermalEnsemble& ens);

/// Off-diagonal part of `op`, with below-floor entries zeroed under FloorPolicy::zero.
LiouvilleVector off_diagonal_part(const EigenbasisOperator& op, FloorPolicy policy = FloorPolicy::zero);

/// Packed Liouville representation of a real symmetric off-diagonal operator.
///
/// Each atom is one pair l < k with omega = E_k - E_l and
/// amplitude = sqrt(2 w_lk) * O_lk / scale. Because the Liouvillian is diagonal
/// in the eigenbasis, the thermal norm squared is sum(amplitude^2) * scale^2 and
/// L acts atom-wise as multiplication by -omega (upper-triangle convention).
struct BohrAtoms {
  std::size_t dimension = 0;
  double scale = 1.0;
  std::vector<double> omega;
  std::vector<double> amplitude;
  std::vector<std::uint32_t> row;
  std::vector<std::uint32_t> col;

  std::size_t size() const noexcept { return omega.size(); }
  /// Thermal norm squared of the packed operator in units of scale^2.
  double norm_squared(Precision precision = Precision::standard) const;
};

BohrAtoms pack_off_diagonal(const EigenbasisOperator& op, const Spectrum& spectrum,
                            const ThermalEnsemble& ens, FloorPolicy policy = FloorPolicy::zero);

}  // namespace opgrowth
