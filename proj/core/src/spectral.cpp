#include "opgrowth/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opgrowth/dd.hpp"

namespace opgrowth {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::zero_norm: return "zero_norm";
    case ErrorCode::boundary_leak: return "boundary_leak";
    case ErrorCode::pole: return "pole";
    case ErrorCode::loss_of_positivity: return "loss_of_positivity";
    case ErrorCode::insufficient_statistics: return "insufficient_statistics";
    case ErrorCode::window_too_small: return "window_too_small";
    case ErrorCode::cutoff_insufficient: return "cutoff_insufficient";
    case ErrorCode::eigensolver_failure: return "eigensolver_failure";
    case ErrorCode::empty_sector: return "empty_sector";
    case ErrorCode::invalid_config: return "invalid_config";
  }
  return "unknown";
}

std::string_view to_string(Precision p) noexcept {
  return p == Precision::extended ? "extended" : "double";
}

std::string_view to_string(FloorPolicy p) noexcept {
  return p == FloorPolicy::keep ? "keep" : "zero";
}

Precision parse_precision(std::string_view s) {
  if (s == "double") return Precision::standard;
  if (s == "extended") return Precision::extended;
  throw Error(ErrorCode::invalid_argument, "unknown precision mode '" + std::string(s) + "'");
}

FloorPolicy parse_floor_policy(std::string_view s) {
  if (s == "zero") return FloorPolicy::zero;
  if (s == "keep") return FloorPolicy::keep;
  throw Error(ErrorCode::invalid_argument, "unknown floor policy '" + std::string(s) + "'");
}

Spectrum::Spectrum(std::vector<double> energies) : energies_(std::move(energies)) {
  require(!energies_.empty(), ErrorCode::invalid_argument, "spectrum must be non-empty");
  for (std::size_t i = 1; i < energies_.size(); ++i) {
    require(energies_[i] >= energies_[i - 1], ErrorCode::invalid_argument,
            "spectrum energies must be sorted non-decreasing");
  }
}

EigenbasisOperator::EigenbasisOperator(Matrix elements, bool hermitian)
    : elements_(std::move(elements)), hermitian_(hermitian) {
  require(elements_.rows() == elements_.cols() && elements_.rows() > 0,
          ErrorCode::dimension_mismatch, "operator matrix must be square and non-empty");
  if (hermitian_) {
    require(elements_ == elements_.transpose(), ErrorCode::invalid_argument,
            "hermitian operator must be exactly symmetric");
  }
}

void EigenbasisOperator::set_below_floor(Mask mask) {
  require(mask.rows() == elements_.rows() && mask.cols() == elements_.cols(),
          ErrorCode::dimension_mismatch, "floor mask shape mismatch");
  below_floor_ = std::move(mask);
}

std::size_t EigenbasisOperator::below_floor_count() const {
  return below_floor_ ? static_cast<std::size_t>(below_floor_->count()) : 0;
}

ThermalEnsemble::ThermalEnsemble(const Spectrum& spectrum, double beta) : beta_(beta) {
  require(beta >= 0.0 && std::isfinite(beta), ErrorCode::invalid_argument, "beta must be finite and >= 0");
  require(spectrum.dimension() > 0, ErrorCode::invalid_argument, "empty spectrum");
  const double e0 = spectrum.ground();
  const std::size_t n = spectrum.dimension();
  std::vector<double> boltz(n);
  double z_shifted = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    boltz[l] = std::exp(-beta * (spectrum[l] - e0));
    z_shifted += boltz[l];
  }
  log_z_ = -beta * e0 + std::log(z_shifted);
  half_.resize(n);
  root_.resize(n);
  const double inv_sqrt_z = 1.0 / std::sqrt(z_shifted);
  const double inv_quart_z = 1.0 / std::sqrt(std::sqrt(z_shifted));
  for (std::size_t l = 0; l < n; ++l) {
    half_[l] = std::exp(-0.5 * beta * (spectrum[l] - e0)) * inv_sqrt_z;
    root_[l] = std::exp(-0.25 * beta * (spectrum[l] - e0)) * inv_quart_z;
  }
}

double ThermalEnsemble::z() const { return std::exp(log_z_); }

Matrix ThermalEnsemble::weights() const {
  Eigen::Map<const Vector> h(half_.data(), static_cast<Eigen::Index>(half_.size()));
  return h * h.transpose();
}

LiouvilleVector LiouvilleVector::identity(std::size_t dim) {
  return {Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
}

double thermal_inner(const LiouvilleVector& a, const LiouvilleVector& b,
                     const ThermalEnsemble& ens, Precision precision) {
  const auto n = static_cast<Eigen::Index>(ens.dimension());
  require(a.amplitudes.rows() == n && a.amplitudes.cols() == n && b.amplitudes.rows() == n &&
              b.amplitudes.cols() == n,
          ErrorCode::dimension_mismatch, "thermal_inner: dimension mismatch");
  Accumulator acc(precision == Precision::extended);
  // row-major traversal, fixed order
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double ab = a.amplitudes(l, k) * b.amplitudes(l, k);
      if (ab != 0.0) acc.add_product(ens.weight(l, k), ab);
    }
  }
  return acc.value();
}

double thermal_norm(const LiouvilleVector& a, const ThermalEnsemble& ens, Precision precision) {
  return std::sqrt(std::max(0.0, thermal_inner(a, a, ens, precision)));
}

LiouvilleVector liouville_apply(const LiouvilleVector& a, const Spectrum& spectrum) {
  const auto n = static_cast<Eigen::Index>(spectrum.dimension());
  require(a.amplitudes.rows() == n && a.amplitudes.cols() == n, ErrorCode::dimension_mismatch,
          "liouville_apply: dimension mismatch");
  LiouvilleVector out{Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      out.amplitudes(l, k) = (spectrum[l] - spectrum[k]) * a.amplitudes(l, k);
    }
  }
  return out;
}

LiouvilleVector normalize(const LiouvilleVector& a, const ThermalEnsemble& ens) {
  const double norm = thermal_norm(a, ens);
  require(norm > 0.0 && std::isfinite(norm), ErrorCode::zero_norm,
          "cannot normalize a zero-norm (static) operator");
  return {a.amplitudes / norm};
}

LiouvilleVector off_diagonal_part(const EigenbasisOperator& op, FloorPolicy policy) {
  LiouvilleVector out{op.elements()};
  out.amplitudes.diagonal().setZero();
  if (policy == FloorPolicy::zero && op.below_floor()) {
    out.amplitudes = op.below_floor()->select(0.0, out.amplitudes);
  }
  return out;
}

double BohrAtoms::norm_squared(Precision precision) const {
  Accumulator acc(precision == Precision::extended);
  for (double a : amplitude) acc.add_product(a, a);
  return acc.value();
}

BohrAtoms pack_off_diagonal(const EigenbasisOperator& op, const Spectrum& spectrum,
                            const ThermalEnsemble& ens, FloorPolicy policy) {
  const std::size_t n = op.dimension();
  require(spectrum.dimension() == n && ens.dimension() == n, ErrorCode::dimension_mismatch,
          "pack_off_diagonal: operator, spectrum and ensemble dimensions differ");
  const Matrix& m = op.elements();
  const bool zero_floor = policy == FloorPolicy::zero && op.below_floor().has_value();

  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < k; ++l) {
      if (zero_floor && (*op.below_floor())(l, k)) continue;
      scale = std::max(scale, std::abs(m(l, k)));
    }

  BohrAtoms atoms;
  atoms.dimension = n;
  atoms.scale = scale > 0.0 ? scale : 1.0;
  if (scale == 0.0) return atoms;

  const double inv_scale = 1.0 / scale;
  const double sqrt2 = std::sqrt(2.0);
  // column-major sweep of the strict upper triangle
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t l = 0; l < k; ++l) {
      double o = m(l, k);
      if (o == 0.0) continue;
      if (zero_floor && (*op.below_floor())(l, k)) continue;
      const double amp = sqrt2 * ens.root(l) * ens.root(k) * (o * inv_scale);
      if (amp == 0.0) continue;
      atoms.omega.push_back(spectrum[k] - spectrum[l]);
      atoms.amplitude.push_back(amp);
      atoms.row.push_back(static_cast<std::uint32_t>(l));
      atoms.col.push_back(static_cast<std::uint32_t>(k));
    }
  }
  return atoms;
}

}  // namespace opgrowth
