// Acceptance run: one PASS/FAIL line per criterion, plus indented detail lines.
// Exit status is 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "opgrowth/analysis.hpp"
#include "opgrowth/dynamics.hpp"
#include "opgrowth/lanczos.hpp"
#include "opgrowth/models.hpp"
#include "opgrowth/spin_chain.hpp"

using namespace opgrowth;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LanczosSequence averaged_random(std::size_t dim, const StructureSpec& spec, double bandwidth, double beta,
                                std::size_t n_max, std::size_t seeds) {
  LanczosSequence avg;
  for (std::size_t s = 1; s <= seeds; ++s) {
    ModelData m = random_ensemble(dim, spec, bandwidth, s);
    LanczosSequence b = lanczos_run(m.op, m.spectrum, ThermalEnsemble(m.spectrum, beta), n_max);
    if (avg.coefficients.empty()) avg.coefficients.assign(b.size(), 0.0);
    const std::size_t n = std::min(avg.size(), b.size());
    avg.coefficients.resize(n);
    for (std::size_t i = 0; i < n; ++i) avg.coefficients[i] += b.coefficients[i] / static_cast<double>(seeds);
  }
  return avg;
}

LanczosSequence run(const ModelData& m, double beta, std::size_t n_max, const LanczosOptions& o = {}) {
  return lanczos_run(m.op, m.spectrum, ThermalEnsemble(m.spectrum, beta), n_max, o);
}

// "Linear b_n": the default-window fit has positive slope, R^2 >= 0.95 and at least 6 points.
bool linear(const GrowthFit& f) { return f.alpha > 0.0 && f.r_squared >= 0.95 && f.n_hi - f.n_lo + 1 >= 6; }

std::string describe(const GrowthFit& f) {
  return fmt("window [%zu,%zu] alpha %.4f +- %.4f, delta %.3f, R2 %.4f", f.n_lo, f.n_hi, f.alpha, f.stderr_alpha,
             f.exponent, f.r_squared);
}

Outcome c1_maximal_flat() {
  Outcome o;
  const LanczosSequence b = averaged_random(2000, StructureSpec::flat(), 40.0, 1.0, 40, 5);
  const GrowthFit f = growth_fit(b, 5, 30);
  o.check(std::abs(f.alpha - pi) <= 0.1 * pi, "dim 2000, bandwidth 40, 5 seeds: " + describe(f));
  double bmax = 0.0;
  for (double x : b.coefficients) bmax = std::max(bmax, x);
  o.info(fmt("max b_n = %.3f; every Bohr frequency is below the bandwidth 40, so b_n cannot reach pi*30", bmax));
  const GrowthFit wide = growth_fit(averaged_random(2000, StructureSpec::flat(), 400.0, 1.0, 40, 5), 5, 30);
  o.info("companion, bandwidth 400: " + describe(wide) + fmt(" (%.2f%% from pi)", 100 * std::abs(wide.alpha / pi - 1)));
  return o;
}

Outcome c2_exponential() {
  Outcome o;
  for (double gamma : {0.5, 1.0}) {
    ModelData m = random_ensemble(2000, StructureSpec::exponential(gamma), 400.0, 1);
    const GrowthFit f = growth_fit(run(m, 1.0, 40), 5, 30);
    const double target = pi / (1.0 + 4.0 * gamma);
    o.check(std::abs(f.alpha - target) <= 0.1 * target,
            fmt("gamma %.1f: target %.4f, ", gamma, target) + describe(f));
  }
  return o;
}

Outcome c3_gaussian() {
  Outcome o;
  ModelData m = random_ensemble(2000, StructureSpec::gaussian(2.0), 400.0, 1);
  const GrowthFit f = growth_fit(run(m, 1.0, 40), 5, 30);
  o.check(f.exponent < 0.9, "sigma 2: " + describe(f));
  return o;
}

Outcome c4_closed_form() {
  Outcome o;
  double worst = 0.0;
  for (double beta : {0.5, 1.0, 2.0})
    for (double gamma : {0.0, 0.5, 1.0}) {
      const auto spec = gamma == 0.0 ? StructureSpec::flat() : StructureSpec::exponential(gamma);
      const ContinuumMoments c = continuum_moments(spec, beta, 12);
      for (int n = 1; n <= 12; ++n) {
        const double b = beta + 4.0 * gamma;
        const double log_ref = (2 * n + 2) * std::log(2.0) + std::lgamma(2.0 * n + 1) - (2 * n + 1) * std::log(b);
        worst = std::max(worst, std::abs(std::expm1(c.moments.log_moments[n - 1] - log_ref)));
      }
    }
  o.check(worst <= 1e-8, fmt("max relative deviation over n<=12, beta {0.5,1,2}, gamma {0,0.5,1}: %.2e", worst));
  return o;
}

Outcome c5_harmonic() {
  Outcome o;
  for (double omega : {1.0, 2.5}) {
    ModelData m = harmonic_position(50, 1.0, omega);
    const LanczosSequence b = run(m, 1.0, 10);
    const bool closed = b.terminated_at && *b.terminated_at == 2 && b.size() == 1;
    o.check(closed && std::abs(b.b(1) - omega) <= 4 * std::numeric_limits<double>::epsilon() * omega,
            fmt("omega %.1f: terminated_at %zu, b_1 - omega = %.1e", omega, b.terminated_at.value_or(0),
                b.size() ? b.b(1) - omega : NAN));
  }
  return o;
}

Outcome c6_xq() {
  Outcome o;
  const int q = 100;
  double worst = 0.0;
  for (long l : {200L, 300L, 400L})
    for (long d = 0; d <= 10; d += 2) worst = std::max(worst, std::abs(gaussian_decay_estimate(q, l, l + d) / uq_binomial_element(q, l, l + d) - 1));
  o.check(worst <= 0.02, fmt("Stirling vs binomial, |l-k| <= 10, l in {200,300,400}: max rel error %.4f", worst));

  bool exact = true;
  for (int p = 1; p <= 12; ++p) {
    const int dim = 15, big = dim + p;
    Matrix u = Matrix::Zero(big, big);
    for (int i = 0; i + 1 < big; ++i) u(i, i + 1) = u(i + 1, i) = 1.0;
    Matrix pw = Matrix::Identity(big, big);
    for (int i = 0; i < p; ++i) pw = pw * u;
    exact = exact && uq_binomial(dim, p).elements() == pw.topLeftCorner(dim, dim);
  }
  o.check(exact, "uq_binomial equals the tridiagonal matrix power for q = 1..12");

  ModelData m = harmonic_position(400);
  m.op = harmonic_power(400, q);
  const GrowthFit f = growth_fit(run(m, 1.0, 40), 5, 30);
  o.check(f.exponent < 0.9, "x^100 at beta 1: " + describe(f));
  return o;
}

Outcome c7_anharmonic() {
  Outcome o;
  double worst = 0.0;
  for (int n = 0; n <= 20; n += 4)
    for (int m = n + 1; m <= 30; m += 5) worst = std::max(worst, semiclassical_log_element(4, n, m).relative_difference());
  o.check(worst <= 1e-6, fmt("log element closed form vs nested quadrature: max rel %.2e", worst));

  AnharmonicConfig cfg;  // p = 4, 50 states
  AnharmonicData d = anharmonic_solve(cfg);
  double bs = 0.0;
  for (int n = 5; n <= 30; ++n) bs = std::max(bs, std::abs(bohr_sommerfeld_energy(4, n) / d.spectrum[n] - 1));
  o.check(bs <= 0.02, fmt("Bohr-Sommerfeld vs grid, n in [5,30]: max rel %.4f", bs));

  LanczosOptions zero, keep;
  zero.floor_policy = FloorPolicy::zero;
  keep.floor_policy = FloorPolicy::keep;
  keep.precision = Precision::standard;
  const LanczosSequence bz = run(d, 1.0, 45, zero);
  const GrowthFit fz = growth_fit(bz);
  o.check(linear(fz), "floor zeroed, linear b_n: " + describe(fz));
  // x only couples opposite parities, so b_n stagger between even and odd n
  const GrowthFit fz30 = growth_fit(bz, 5, 30);
  o.check(fz30.alpha > 0.0 && fz30.alpha < pi, "floor zeroed, 0 < alpha < pi/beta: " + describe(fz30));
  const SlopeChange sz = detect_slope_change(bz);
  o.info(fmt("floor zeroed slope change: %s (ratio %.2f)", sz.detected ? "yes" : "no", sz.ratio));
  const SlopeChange sk = detect_slope_change(run(d, 1.0, 45, keep));
  o.check(sk.detected, fmt("floor kept, double precision: upward slope change at n=%zu, slope %.3f -> %.3f",
                           sk.split, sk.slope_before, sk.slope_after));
  return o;
}

Outcome c8_box1d() {
  Outcome o;
  ModelData m = box_position_1d(600, 10.0);
  for (double beta : {0.5, 1.0, 2.0}) {
    const GrowthFit f = growth_fit(run(m, beta, 40), 5, 30);
    o.check(std::abs(f.alpha * beta / pi - 1) <= 0.1, fmt("beta %.1f: pi/beta %.4f, ", beta, pi / beta) + describe(f));
  }
  return o;
}

Outcome c9_box2d() {
  Outcome o;
  Box2dData m = box_position_2d({40, 40}, {10.0, 10.0 * pi / 3.0});
  for (const auto& w : m.warnings) o.info("model: " + w);
  const GrowthFit f = growth_fit(run(m, 1.0, 40));
  o.check(std::abs(f.alpha / pi - 1) <= 0.1, "40x40, lengths (10, 10 pi/3), beta 1, before saturation: " + describe(f));
  return o;
}

Outcome c10_xxz() {
  Outcome o;
  ChainConfig nnn;
  nnn.sites = 12;
  nnn.j2 = 1.0;
  ChainConfig nn = nnn;
  nn.j2 = 0.0;
  StructureOptions so;
  so.ebar_lo = -0.5;
  so.ebar_hi = 0.5;

  const auto t0 = std::chrono::steady_clock::now();
  ChainEigenbasis a = diagonalize_to_eigenbasis(build_hamiltonian(nnn), flip_flop_operator(nnn));
  const StructureFunctionFit fa = extract_structure_function(a.op, a.spectrum, so);
  o.check(fa.classified == DecayClass::exponential,
          fmt("NNN structure function: %s (R2 exp %.4f, gauss %.4f, power %.4f)", std::string(to_string(fa.classified)).c_str(),
              fa.exponential.r_squared, fa.gaussian.r_squared, fa.power.r_squared));
  const GrowthFit ga = growth_fit(run({a.spectrum, a.op, {}}, 1.0, 40));
  o.check(linear(ga) && ga.alpha <= pi, "NNN b_n: " + describe(ga));

  ChainEigenbasis b = diagonalize_to_eigenbasis(build_hamiltonian(nn), flip_flop_operator(nn));
  const StructureFunctionFit fb = extract_structure_function(b.op, b.spectrum, so);
  o.check(fb.classified == DecayClass::gaussian && fb.crossover,
          fmt("NN structure function: %s, crossover %s (tail rates %.3f -> %.3f)",
              std::string(to_string(fb.classified)).c_str(), fb.crossover ? "yes" : "no", fb.lower_rate, fb.upper_rate));

  for (std::size_t keep : {300u, 600u}) {
    ModelData t = truncate_operator(b.op, b.spectrum, keep);
    const GrowthFit gt = growth_fit(run(t, 1.0, 40));
    o.check(linear(gt), fmt("NN truncated to %zu states: ", keep) + describe(gt));
  }
  o.info(fmt("L=12 pipeline wall time %.1f s",
             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
  return o;
}

Outcome c11_engine() {
  Outcome o;
  LanczosSequence b12;
  for (int n = 1; n <= 12; ++n) b12.coefficients.push_back(std::sqrt(n * (n + 0.7)) + 0.3 * std::sin(n));
  const LanczosSequence back =
      lanczos_from_moments(moments_from_lanczos(b12, std::nullopt, Precision::extended), Precision::extended);
  double rt = back.size() == 12 ? 0.0 : INFINITY;
  for (std::size_t n = 1; n <= std::min<std::size_t>(12, back.size()); ++n) rt = std::max(rt, std::abs(back.b(n) / b12.b(n) - 1));
  o.check(rt <= 1e-8, fmt("b -> moments -> b, extended, length 12: max rel %.2e", rt));

  ModelData m = random_ensemble(300, StructureSpec::exponential(0.2), 60.0, 3);
  ThermalEnsemble ens(m.spectrum, 1.0);
  const MomentSequence direct = moments_direct(m.op, m.spectrum, ens, 10);
  const MomentSequence via = moments_from_lanczos(lanczos_run(m.op, m.spectrum, ens, 10));
  double mx = 0.0;
  for (std::size_t n = 1; n <= 10; ++n) mx = std::max(mx, std::abs(via.moment(n) / direct.moment(n) - 1));
  o.check(mx <= 1e-6, fmt("moments_direct vs moments_from_lanczos, n <= 10: max rel %.2e", mx));

  const double alpha = 0.5;
  LanczosSequence lin;
  for (int n = 1; n <= 200; ++n) lin.coefficients.push_back(alpha * n);
  std::vector<double> t;
  for (int i = 0; i <= 80; ++i) t.push_back(0.1 * i);  // alpha t up to 4
  const KrylovWavefunction phi = propagate_chain(lin, t);
  const std::vector<double> ck = krylov_complexity(phi);
  double sh = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) sh = std::max(sh, std::abs(ck[i] / std::pow(std::sinh(alpha * t[i]), 2) - 1));
  o.check(phi.max_norm_error <= 1e-8, fmt("chain norm conservation: max |1 - ||phi||| = %.2e", phi.max_norm_error));
  o.check(sh <= 0.01, fmt("C_K vs sinh^2(alpha t), alpha t <= 4: max rel %.2e", sh));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"maximal rate, flat ensemble", c1_maximal_flat},
      {"sub-maximal rate, exponential envelope", c2_exponential},
      {"sub-linear growth, Gaussian envelope", c3_gaussian},
      {"closed-form continuum moments", c4_closed_form},
      {"harmonic termination", c5_harmonic},
      {"x^q Gaussian decay", c6_xq},
      {"anharmonic pipeline", c7_anharmonic},
      {"1D box maximality", c8_box1d},
      {"2D box", c9_box2d},
      {"XXZ chain at L=12", c10_xxz},
      {"engine round trips", c11_engine},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  criterion %zu: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, s);
    for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
