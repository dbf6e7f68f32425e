#include "opgrowth/spin_chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "linalg.hpp"

namespace opgrowth {

namespace {

std::uint32_t bit(int site) { return std::uint32_t{1} << site; }

std::size_t index_of(const std::vector<std::uint32_t>& basis, std::uint32_t state) {
  auto it = std::lower_bound(basis.begin(), basis.end(), state);
  return static_cast<std::size_t>(it - basis.begin());
}

LawFit fit_log(const std::vector<double>& x, const std::vector<double>& y) {
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
  LawFit f;
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

}  // namespace

void ChainConfig::validate() const {
  require(sites >= 2 && sites <= 14 && sites % 2 == 0, ErrorCode::invalid_argument,
          "chain length must be even and between 2 and 14");
  require(!(sites < 4 && j2 != 0.0), ErrorCode::invalid_argument,
          "next-nearest coupling needs at least 4 sites");
  require(up_spins() >= 0 && up_spins() <= sites, ErrorCode::empty_sector,
          "magnetization sector sz=" + std::to_string(sz) + " is empty for L=" + std::to_string(sites));
}

std::vector<std::uint32_t> sector_basis(const ChainConfig& cfg) {
  cfg.validate();
  std::vector<std::uint32_t> states;
  const std::uint32_t end = bit(cfg.sites);
  for (std::uint32_t s = 0; s < end; ++s)
    if (std::popcount(s) == cfg.up_spins()) states.push_back(s);
  return states;
}

Matrix build_hamiltonian(const ChainConfig& cfg) {
  const std::vector<std::uint32_t> basis = sector_basis(cfg);
  const auto d = static_cast<Eigen::Index>(basis.size());
  const int l = cfg.sites;
  struct Coupling {
    int range;
    double j, delta;
  };
  const Coupling couplings[] = {{1, cfg.j1, cfg.delta1}, {2, cfg.j2, cfg.delta2}};

  Matrix h = Matrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const std::uint32_t s = basis[a];
    for (const Coupling& c : couplings) {
      if (c.j == 0.0) continue;
      for (int i = 0; i < l; ++i) {
        const int j = (i + c.range) % l;
        const bool up_i = s & bit(i), up_j = s & bit(j);
        h(a, a) += c.j * c.delta * (up_i == up_j ? 0.25 : -0.25);
        if (up_i != up_j) {
          // (S+S- + S-S+)/2 swaps an antiparallel pair
          const std::uint32_t t = s ^ bit(i) ^ bit(j);
          h(static_cast<Eigen::Index>(index_of(basis, t)), a) += 0.5 * c.j;
        }
      }
    }
  }
  return h;
}

Matrix flip_flop_operator(const ChainConfig& cfg) {
  const std::vector<std::uint32_t> basis = sector_basis(cfg);
  const auto d = static_cast<Eigen::Index>(basis.size());
  const int l = cfg.sites;
  Matrix b = Matrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const std::uint32_t s = basis[a];
    for (int i = 0; i < l; ++i) {
      const int j = (i + 2) % l;
      if (i == j) continue;
      const bool up_i = s & bit(i), up_j = s & bit(j);
      if (up_i == up_j) continue;
      const std::uint32_t t = s ^ bit(i) ^ bit(j);
      b(static_cast<Eigen::Index>(index_of(basis, t)), a) += 1.0 / l;
    }
  }
  return b;
}

Matrix translation_operator(const ChainConfig& cfg) {
  const std::vector<std::uint32_t> basis = sector_basis(cfg);
  const auto d = static_cast<Eigen::Index>(basis.size());
  const int l = cfg.sites;
  const std::uint32_t mask = bit(l) - 1;
  Matrix t = Matrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const std::uint32_t s = basis[a];
    const std::uint32_t shifted = ((s << 1) | (s >> (l - 1))) & mask;
    t(static_cast<Eigen::Index>(index_of(basis, shifted)), a) = 1.0;
  }
  return t;
}

ChainEigenbasis diagonalize_to_eigenbasis(const Matrix& h, const Matrix& b) {
  require(h.rows() == h.cols() && b.rows() == b.cols() && h.rows() == b.rows(),
          ErrorCode::dimension_mismatch, "Hamiltonian and operator sector dimensions differ");
  linalg::EigenPairs ep = linalg::symmetric_eigen(h);
  const Matrix rotated = ep.vectors.transpose() * b * ep.vectors;
  Matrix sym = 0.5 * (rotated + rotated.transpose());

  std::vector<double> e(ep.values.data(), ep.values.data() + ep.values.size());
  std::size_t degenerate = 0;
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i] - e[i - 1] < 1e-10) ++degenerate;
  ChainEigenbasis out{Spectrum(std::move(e)), EigenbasisOperator(std::move(sym)), std::move(ep.vectors), {}};
  if (degenerate > 0) {
    std::ostringstream msg;
    msg << degenerate << " degenerate level pairs (within 1e-10) remain after magnetization resolution";
    out.warnings.push_back(msg.str());
  }
  return out;
}

StructureFunctionFit extract_structure_function(const EigenbasisOperator& op, const Spectrum& spectrum,
                                                const StructureOptions& options) {
  const std::size_t d = op.dimension();
  require(spectrum.dimension() == d, ErrorCode::dimension_mismatch,
          "extract_structure_function: operator and spectrum dimensions differ");
  const double width = spectrum.top() - spectrum.ground();
  StructureFunctionFit fit;
  fit.ebar_lo = options.ebar_lo.value_or(spectrum.ground() + 0.4 * width);
  fit.ebar_hi = options.ebar_hi.value_or(spectrum.ground() + 0.6 * width);
  require(fit.ebar_hi > fit.ebar_lo, ErrorCode::invalid_argument, "Ebar window is empty");

  std::vector<double> omega, value;
  const Matrix& m = op.elements();
  const double degenerate = 1e-9 * std::max(1.0, width);
  for (std::size_t k = 1; k < d; ++k)
    for (std::size_t l = 0; l < k; ++l) {
      const double ebar = 0.5 * (spectrum[l] + spectrum[k]);
      if (ebar < fit.ebar_lo || ebar > fit.ebar_hi) continue;
      // elements inside degenerate subspaces depend on the eigenbasis choice
      if (spectrum[k] - spectrum[l] <= degenerate) continue;
      omega.push_back(spectrum[k] - spectrum[l]);
      value.push_back(m(l, k) * m(l, k));
    }
  fit.pairs = omega.size();
  if (fit.pairs < options.min_pairs) {
    std::ostringstream msg;
    msg << "only " << fit.pairs << " eigenstate pairs with Ebar in [" << fit.ebar_lo << ", "
        << fit.ebar_hi << "]; need " << options.min_pairs;
    throw Error(ErrorCode::insufficient_statistics, msg.str());
  }

  const double omega_max = *std::max_element(omega.begin(), omega.end());
  double bw = options.bin_width;
  if (bw <= 0.0) {
    std::size_t levels = 0;
    for (double e : spectrum.energies())
      if (e >= fit.ebar_lo && e <= fit.ebar_hi) ++levels;
    const double spacing = (fit.ebar_hi - fit.ebar_lo) / std::max<std::size_t>(levels, 1);
    bw = std::max(10.0 * spacing, omega_max / 40.0);
  }
  require(bw > 0.0, ErrorCode::invalid_argument, "bin width must be > 0");
  fit.bin_width = bw;

  const std::size_t nbins = static_cast<std::size_t>(std::floor(omega_max / bw)) + 1;
  std::vector<double> sum(nbins, 0.0);
  std::vector<std::size_t> count(nbins, 0);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const std::size_t b = std::min(nbins - 1, static_cast<std::size_t>(omega[i] / bw));
    sum[b] += value[i];
    ++count[b];
  }
  for (std::size_t b = 0; b < nbins; ++b) {
    if (count[b] == 0) continue;
    fit.bins.push_back({(b + 0.5) * bw, std::sqrt(sum[b] / count[b]), count[b]});
  }

  // tail: from one e-fold below the plateau maximum to where the counts thin out;
  // bins holding fewer than 2% of the fullest bin's pairs are not trusted
  const auto& bins = fit.bins;
  std::size_t cmax = 0;
  for (const auto& bin : bins) cmax = std::max(cmax, bin.count);
  auto trusted = [&](std::size_t i) {
    return static_cast<double>(bins[i].count) >= 0.02 * cmax && bins[i].rms > 0.0;
  };
  std::size_t imax = 0;
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (trusted(i) && bins[i].rms > bins[imax].rms) imax = i;
  std::size_t begin = bins.size();
  for (std::size_t i = imax; i < bins.size(); ++i)
    if (trusted(i) && bins[i].rms <= bins[imax].rms * std::exp(-1.0)) {
      begin = i;
      break;
    }
  if (begin == bins.size()) {
    fit.classified = DecayClass::flat;
    fit.warnings.push_back("no bin falls one e-fold below the plateau: classified flat");
    return fit;
  }
  std::size_t end = bins.size();
  for (std::size_t i = begin; i < bins.size(); ++i)
    if (!trusted(i)) {
      end = i;
      break;
    }
  if (end < begin + 3) {
    fit.warnings.push_back("tail shorter than 3 bins; fitting from the plateau maximum");
    begin = imax;
  }
  if (end < begin + 3) {
    throw Error(ErrorCode::insufficient_statistics, "fewer than 3 structure-function bins to fit");
  }
  fit.tail_begin = begin;
  fit.tail_end = end;

  std::vector<double> x1, x2, x3, y;
  for (std::size_t i = begin; i < end; ++i) {
    const double w = bins[i].omega;
    x1.push_back(w);
    x2.push_back(w * w);
    x3.push_back(std::log(w));
    y.push_back(std::log(bins[i].rms));
  }
  fit.exponential = fit_log(x1, y);
  fit.gaussian = fit_log(x2, y);
  fit.power = fit_log(x3, y);

  const double best = std::max({fit.exponential.r_squared, fit.gaussian.r_squared, fit.power.r_squared});
  if (fit.exponential.r_squared >= best - options.tie_tolerance) {
    fit.classified = DecayClass::exponential;
    fit.parameter = -fit.exponential.slope;
  } else if (fit.gaussian.r_squared >= fit.power.r_squared) {
    fit.classified = DecayClass::gaussian;
    fit.parameter = fit.gaussian.slope < 0.0 ? std::sqrt(-0.5 / fit.gaussian.slope) : 0.0;
  } else {
    fit.classified = DecayClass::power;
    fit.parameter = -fit.power.slope;
  }

  const std::size_t mid = begin + (end - begin) / 2;
  if (mid - begin >= 2 && end - mid >= 2) {
    const std::vector<double> xl(x1.begin(), x1.begin() + (mid - begin));
    const std::vector<double> yl(y.begin(), y.begin() + (mid - begin));
    const std::vector<double> xu(x1.begin() + (mid - begin), x1.end());
    const std::vector<double> yu(y.begin() + (mid - begin), y.end());
    fit.lower_rate = -fit_log(xl, yl).slope;
    fit.upper_rate = -fit_log(xu, yu).slope;
  }
  fit.crossover = fit.classified == DecayClass::gaussian && fit.lower_rate > 0.0 &&
                  fit.upper_rate >= 2.0 * fit.lower_rate;
  return fit;
}

ModelData truncate_operator(const EigenbasisOperator& op, const Spectrum& spectrum, std::size_t keep_n) {
  require(spectrum.dimension() == op.dimension(), ErrorCode::dimension_mismatch,
          "truncate_operator: operator and spectrum dimensions differ");
  require(keep_n >= 1 && keep_n <= op.dimension(), ErrorCode::invalid_argument,
          "keep_n must be between 1 and the dimension");
  const auto n = static_cast<Eigen::Index>(keep_n);
  std::vector<double> e(spectrum.energies().begin(), spectrum.energies().begin() + n);
  EigenbasisOperator block(op.elements().topLeftCorner(n, n), op.hermitian());
  if (op.below_floor()) block.set_below_floor(op.below_floor()->topLeftCorner(n, n));
  return {Spectrum(std::move(e)), std::move(block), {}};
}

}  // namespace opgrowth
