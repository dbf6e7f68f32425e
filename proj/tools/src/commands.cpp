#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include "opgrowth/dynamics.hpp"

namespace opgrowth::cli {

using nlohmann::json;

namespace {

template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(); }

}  // namespace

BuiltModel build_model(const ModelConfig& m, std::uint64_t seed) {
  BuiltModel out;
  switch (m.kind) {
    case ModelKind::harmonic: {
      out.data = harmonic_position(m.dim, m.mass, m.omega);
      if (m.harmonic_op == HarmonicOperator::x_power)
        out.data.op = harmonic_power(m.dim, m.q, m.mass, m.omega);
      else if (m.harmonic_op == HarmonicOperator::u_power)
        out.data.op = uq_binomial(m.dim, m.q);
      break;
    }
    case ModelKind::box1d:
      out.data = box_position_1d(m.dim, m.length, m.mass);
      out.structure = StructureSpec::power(2.0);
      break;
    case ModelKind::box2d: {
      Box2dData b = box_position_2d(m.dims, m.lengths, m.mass);
      out.data = std::move(static_cast<ModelData&>(b));
      out.structure = StructureSpec::power(2.0);
      break;
    }
    case ModelKind::anharmonic:
      out.data = anharmonic_solve(m.anharmonic);
      break;
    case ModelKind::semiclassical:
      out.data = semiclassical_operator(m.anharmonic.p, m.dim, m.mass, m.prefactor);
      break;
    case ModelKind::random:
      out.data = random_ensemble(m.dim, m.structure, m.bandwidth, seed);
      out.structure = m.structure;
      break;
    case ModelKind::xxz: {
      ChainEigenbasis eb = diagonalize_to_eigenbasis(build_hamiltonian(m.chain), flip_flop_operator(m.chain));
      out.data = {std::move(eb.spectrum), std::move(eb.op), std::move(eb.warnings)};
      if (m.keep_n) {
        if (*m.keep_n > out.data.spectrum.dimension())
          throw Error(ErrorCode::invalid_config, "model.keep_n exceeds the sector dimension " +
                                                     std::to_string(out.data.spectrum.dimension()));
        ModelData t = truncate_operator(out.data.op, out.data.spectrum, *m.keep_n);
        t.warnings = std::move(out.data.warnings);
        out.data = std::move(t);
      }
      break;
    }
  }
  return out;
}

LanczosSequence run_lanczos(const RunConfig& c, const BuiltModel& model, int jobs) {
  const auto once = [&](const ModelData& d) {
    ThermalEnsemble ens(d.spectrum, c.beta);
    return lanczos_run(d.op, d.spectrum, ens, c.lanczos.n_max, c.lanczos.options);
  };
  if (c.model.kind != ModelKind::random || c.lanczos.seeds == 1) return once(model.data);

  std::vector<LanczosSequence> runs(c.lanczos.seeds);
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    runs[i] = i == 0 ? once(model.data) : once(build_model(c.model, c.seed + i).data);
  });
  std::size_t len = runs.front().size();
  for (const auto& r : runs) len = std::min(len, r.size());
  LanczosSequence avg = runs.front();
  avg.coefficients.assign(len, 0.0);
  for (const auto& r : runs)
    for (std::size_t n = 0; n < len; ++n) avg.coefficients[n] += r.coefficients[n] / static_cast<double>(runs.size());
  avg.warnings.push_back("b_n averaged over seeds " + std::to_string(c.seed) + ".." +
                         std::to_string(c.seed + c.lanczos.seeds - 1));
  return avg;
}

GrowthReport report_for(const RunConfig& c, const BuiltModel& model, const LanczosSequence& b) {
  std::optional<StructureSpec> decay = c.analysis.expected ? c.analysis.expected : model.structure;
  std::string source = c.analysis.expected ? "configured" : "model";
  if (!decay && c.model.kind == ModelKind::xxz) {
    decay = extract_structure_function(model.data.op, model.data.spectrum, c.structure.options).spec();
    source = "extracted structure function";
  }
  GrowthReport r = build_report(b, decay.value_or(StructureSpec::flat()), c.beta, c.analysis.window,
                                c.analysis.tolerance);
  if (!decay) {
    r.alpha_predicted.reset();
    r.prediction_mismatch = false;
    r.notes.push_back("no decay class declared; no growth-rate prediction");
    std::erase_if(r.notes, [](const std::string& s) { return s.starts_with("gaussian envelope predicts"); });
  } else {
    r.notes.push_back("decay class from " + source);
  }
  return r;
}

json report_json(const GrowthReport& r) {
  return {{"fitted", r.fitted},
          {"alpha_fit", r.alpha_fit},
          {"alpha_stderr", r.alpha_stderr},
          {"exponent", r.exponent},
          {"r_squared", r.r_squared},
          {"window", {r.n_lo, r.n_hi}},
          {"alpha_bound", r.alpha_bound},
          {"alpha_predicted", optional_number(r.alpha_predicted)},
          {"saturation_ratio", r.saturation_ratio},
          {"decay_class", std::string(to_string(r.decay_class))},
          {"decay_parameter", r.decay_parameter},
          {"bound_exceeded", r.bound_exceeded},
          {"prediction_mismatch", r.prediction_mismatch},
          {"notes", r.notes}};
}

json structure_json(const StructureFunctionFit& f) {
  auto law = [](const LawFit& l) {
    return json{{"slope", l.slope}, {"intercept", l.intercept}, {"r_squared", l.r_squared}};
  };
  return {{"class", std::string(to_string(f.classified))},
          {"parameter", f.parameter},
          {"ebar_window", {f.ebar_lo, f.ebar_hi}},
          {"bin_width", f.bin_width},
          {"pairs", f.pairs},
          {"tail_bins", {f.tail_begin, f.tail_end}},
          {"exponential", law(f.exponential)},
          {"gaussian", law(f.gaussian)},
          {"power", law(f.power)},
          {"lower_rate", f.lower_rate},
          {"upper_rate", f.upper_rate},
          {"crossover", f.crossover},
          {"warnings", f.warnings}};
}

void cmd_model(const RunConfig& c, OutputDir& out) {
  BuiltModel model = build_model(c.model, c.seed);
  out.warn_all(model.data.warnings, "model");
  const Spectrum& s = model.data.spectrum;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.dimension(); ++i) rows.push_back({static_cast<double>(i + 1), s[i]});
  out.write_csv("spectrum.csv", {"index", "energy"}, rows);

  // sparse triplets, 1-based, every stored nonzero entry (both triangles)
  rows.clear();
  const Matrix& m = model.data.op.elements();
  for (Eigen::Index k = 0; k < m.cols(); ++k)
    for (Eigen::Index l = 0; l < m.rows(); ++l)
      if (m(l, k) != 0.0) rows.push_back({static_cast<double>(l + 1), static_cast<double>(k + 1), m(l, k)});
  out.write_csv("operator.csv", {"row", "col", "value"}, rows);
  out.note("dimension", s.dimension());
  out.note("below_floor_entries", model.data.op.below_floor_count());
}

namespace {

void write_lanczos(OutputDir& out, const LanczosSequence& b) {
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 1; n <= b.size(); ++n) rows.push_back({static_cast<double>(n), b.b(n)});
  out.write_csv("lanczos.csv", {"n", "b_n"}, rows);
  out.warn_all(b.warnings, "lanczos");
  if (b.terminated_at)
    out.warn("lanczos: Krylov space closed; b_" + std::to_string(*b.terminated_at) + " vanished");
  out.note("lanczos", {{"terminated_at", b.terminated_at ? json(*b.terminated_at) : json()},
                       {"precision", std::string(to_string(b.precision_mode))},
                       {"reorthogonalized", b.reorthogonalized},
                       {"seed_norm", b.seed_norm}});
}

}  // namespace

void cmd_lanczos(const RunConfig& c, OutputDir& out, int jobs) {
  BuiltModel model = build_model(c.model, c.seed);
  out.warn_all(model.data.warnings, "model");
  LanczosSequence b = run_lanczos(c, model, jobs);
  write_lanczos(out, b);
  GrowthReport r = report_for(c, model, b);
  out.write_json("growth_report.json", report_json(r));
  if (r.bound_exceeded) out.warn("report: fitted alpha exceeds pi/beta");
  if (c.model.kind == ModelKind::anharmonic) {
    SlopeChange sc = detect_slope_change(b);
    if (sc.detected)
      out.warn("lanczos: upward slope change at n=" + std::to_string(sc.split) + " (ratio " +
               format_real(sc.ratio) + "); likely precision-floor artefact");
  }
}

void cmd_dynamics(const RunConfig& c, OutputDir& out, int jobs) {
  BuiltModel model = build_model(c.model, c.seed);
  out.warn_all(model.data.warnings, "model");
  LanczosSequence b = run_lanczos(c, model, jobs);
  const std::vector<double> t = c.dynamics.grid();

  KrylovWavefunction phi = propagate_chain(b, t);
  const std::vector<double> ck = krylov_complexity(phi);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], ck[i]});
  out.write_csv("complexity.csv", {"t", "C_K"}, rows);

  ThermalEnsemble ens(model.data.spectrum, c.beta);
  const std::vector<double> corr = correlation_function(model.data.op, model.data.spectrum, ens, t, false,
                                                        c.lanczos.options.floor_policy);
  rows.clear();
  for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], corr[i]});
  out.write_csv("correlation.csv", {"t", "C"}, rows);

  out.warn_all(phi.warnings, "dynamics");
  if (phi.max_norm_error > 1e-8) out.warn("dynamics: norm drift " + format_real(phi.max_norm_error));
  out.note("norms", {{"max_norm_error", phi.max_norm_error},
                     {"max_boundary_occupancy", phi.max_boundary_occupancy},
                     {"chain_sites", phi.sites},
                     {"padded_from", phi.padded_from}});
}

void cmd_structure(const RunConfig& c, OutputDir& out) {
  BuiltModel model = build_model(c.model, c.seed);
  out.warn_all(model.data.warnings, "model");
  StructureFunctionFit f = extract_structure_function(model.data.op, model.data.spectrum, c.structure.options);
  std::vector<std::vector<double>> rows;
  for (const auto& bin : f.bins) rows.push_back({bin.omega, bin.rms, static_cast<double>(bin.count)});
  out.write_csv("structure_function.csv", {"omega", "rms_element", "count"}, rows);
  out.write_json("growth_report.json", {{"structure", structure_json(f)}});
  out.warn_all(f.warnings, "structure");
}

void cmd_sweep(const RunConfig& c, OutputDir& out, int jobs) {
  if (c.sweep.empty()) throw Error(ErrorCode::invalid_config, "sweep: no parameter lists given");
  if (!c.sweep.gamma.empty() && c.model.kind != ModelKind::random)
    throw Error(ErrorCode::invalid_config, "sweep.gamma needs a random model");
  if (!c.sweep.p.empty() && c.model.kind != ModelKind::anharmonic && c.model.kind != ModelKind::semiclassical)
    throw Error(ErrorCode::invalid_config, "sweep.p needs an anharmonic or semiclassical model");
  if (!c.sweep.sites.empty() && c.model.kind != ModelKind::xxz)
    throw Error(ErrorCode::invalid_config, "sweep.sites needs an xxz model");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto axis = [&](const auto& v) {
    std::vector<double> a(v.begin(), v.end());
    if (a.empty()) a.push_back(nan);
    return a;
  };
  const auto betas = axis(c.sweep.beta), gammas = axis(c.sweep.gamma), ps = axis(c.sweep.p),
             sites = axis(c.sweep.sites);
  std::vector<std::array<double, 4>> grid;
  for (double b : betas)
    for (double g : gammas)
      for (double p : ps)
        for (double l : sites) grid.push_back({b, g, p, l});

  std::vector<RunConfig> points(grid.size(), c);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    RunConfig& pc = points[i];
    const auto& [b, g, p, l] = grid[i];
    if (!std::isnan(b)) pc.beta = b;
    if (!std::isnan(g)) pc.model.structure = StructureSpec::exponential(g);
    if (!std::isnan(p)) pc.model.anharmonic.p = static_cast<int>(p);
    if (!std::isnan(l)) {
      pc.model.chain.sites = static_cast<int>(l);
      pc.model.chain.validate();
    }
  }

  // each point is independent and writes only its own slot, so results do not depend on jobs
  std::vector<GrowthReport> reports(grid.size());
  std::vector<std::vector<std::string>> warnings(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    BuiltModel model = build_model(points[i].model, points[i].seed);
    LanczosSequence b = run_lanczos(points[i], model, 1);
    reports[i] = report_for(points[i], model, b);
    warnings[i] = model.data.warnings;
  });

  std::vector<std::vector<double>> rows;
  json detail = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GrowthReport& r = reports[i];
    rows.push_back({grid[i][0], grid[i][1], grid[i][2], grid[i][3], r.alpha_fit, r.alpha_stderr, r.exponent,
                    r.alpha_bound, r.alpha_predicted.value_or(nan), r.saturation_ratio});
    detail.push_back(report_json(r));
    out.warn_all(warnings[i], "point " + std::to_string(i + 1));
  }
  out.write_csv("sweep.csv",
                {"beta", "gamma", "p", "sites", "alpha_fit", "alpha_stderr", "exponent", "alpha_bound",
                 "alpha_predicted", "saturation_ratio"},
                rows);
  out.write_json("sweep_reports.json", detail);
}

int run_command(const std::string& command, const RunConfig& c, int jobs) {
  OutputDir out(c.output);
  if (command == "model")
    cmd_model(c, out);
  else if (command == "lanczos")
    cmd_lanczos(c, out, jobs);
  else if (command == "dynamics")
    cmd_dynamics(c, out, jobs);
  else if (command == "structure")
    cmd_structure(c, out);
  else if (command == "sweep")
    cmd_sweep(c, out, jobs);
  else
    throw Error(ErrorCode::invalid_argument, "unknown command " + command);
  out.finish(command, to_json(c));
  return 0;
}

}  // namespace opgrowth::cli
