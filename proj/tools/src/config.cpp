#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace opgrowth::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::invalid_config, path + ": " + what);
}

// Reads keys of one JSON object and remembers which were consumed, so that
// leftovers (typos) can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  std::optional<T> get(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      bad(where(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    return get<T>(key).value_or(std::move(fallback));
  }

  std::optional<Reader> child(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    return Reader(j_.at(key), where(key));
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) bad(where(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class T>
void positive(const Reader& r, const std::string& key, T value) {
  if (!(value > T(0))) bad(r.where(key), "must be > 0");
}

ModelKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "harmonic") return ModelKind::harmonic;
  if (s == "box1d") return ModelKind::box1d;
  if (s == "box2d") return ModelKind::box2d;
  if (s == "anharmonic") return ModelKind::anharmonic;
  if (s == "semiclassical") return ModelKind::semiclassical;
  if (s == "random") return ModelKind::random;
  if (s == "xxz") return ModelKind::xxz;
  bad(path, "unknown model type '" + s + "'");
}

HarmonicOperator parse_harmonic_op(const std::string& s, const std::string& path) {
  if (s == "x") return HarmonicOperator::x;
  if (s == "x_power") return HarmonicOperator::x_power;
  if (s == "u_power") return HarmonicOperator::u_power;
  bad(path, "operator must be x, x_power or u_power");
}

const char* to_string(HarmonicOperator o) {
  switch (o) {
    case HarmonicOperator::x: return "x";
    case HarmonicOperator::x_power: return "x_power";
    case HarmonicOperator::u_power: return "u_power";
  }
  return "?";
}

StructureSpec parse_structure(Reader r) {
  StructureSpec s;
  const std::string cls = r.get_or<std::string>("class", "flat");
  try {
    s.decay = parse_decay_class(cls);
  } catch (const Error&) {
    bad(r.where("class"), "unknown decay class '" + cls + "'");
  }
  s.parameter = r.get_or("parameter", 0.0);
  r.finish();
  try {
    s.validate();
  } catch (const Error& e) {
    bad(r.where("parameter"), e.what());
  }
  return s;
}

json structure_json(const StructureSpec& s) {
  return {{"class", std::string(to_string(s.decay))}, {"parameter", s.parameter}};
}

ModelConfig parse_model(Reader r) {
  ModelConfig m;
  const auto type = r.get<std::string>("type");
  if (!type) bad(r.where("type"), "required");
  m.kind = parse_kind(*type, r.where("type"));
  auto dim_default = [&](std::size_t d) { m.dim = r.get_or<std::size_t>("dim", d); positive(r, "dim", m.dim); };
  switch (m.kind) {
    case ModelKind::harmonic:
      dim_default(100);
      m.mass = r.get_or("mass", 1.0);
      m.omega = r.get_or("omega", 1.0);
      m.harmonic_op = parse_harmonic_op(r.get_or<std::string>("operator", "x"), r.where("operator"));
      m.q = r.get_or("q", m.harmonic_op == HarmonicOperator::x ? 1 : 2);
      positive(r, "mass", m.mass);
      positive(r, "omega", m.omega);
      if (m.q < 1) bad(r.where("q"), "must be >= 1");
      break;
    case ModelKind::box1d:
      dim_default(600);
      m.length = r.get_or("length", 10.0);
      m.mass = r.get_or("mass", 1.0);
      positive(r, "length", m.length);
      positive(r, "mass", m.mass);
      break;
    case ModelKind::box2d:
      m.dims = r.get_or("dims", std::array<std::size_t, 2>{40, 40});
      m.lengths = r.get_or("lengths", std::array<double, 2>{1.0, 1.0});
      m.mass = r.get_or("mass", 1.0);
      for (int a = 0; a < 2; ++a) {
        if (m.dims[a] == 0) bad(r.where("dims"), "must be > 0");
        if (!(m.lengths[a] > 0.0)) bad(r.where("lengths"), "must be > 0");
      }
      positive(r, "mass", m.mass);
      break;
    case ModelKind::anharmonic:
      m.anharmonic.p = r.get_or("p", 4);
      m.anharmonic.grid_points = r.get_or("grid_points", 4096);
      m.anharmonic.grid_halfwidth = r.get<double>("halfwidth");
      m.anharmonic.mass = m.mass = r.get_or("mass", 1.0);
      m.anharmonic.n_states = r.get_or("n_states", 50);
      m.anharmonic.floor_rel = r.get_or("floor_rel", 1e-13);
      m.anharmonic.boundary_tolerance = r.get_or("boundary_tolerance", 1e-10);
      if (m.anharmonic.p < 2 || m.anharmonic.p % 2) bad(r.where("p"), "must be an even integer >= 2");
      if (m.anharmonic.n_states < 2) bad(r.where("n_states"), "must be >= 2");
      if (m.anharmonic.grid_points <= m.anharmonic.n_states) bad(r.where("grid_points"), "must exceed n_states");
      positive(r, "mass", m.mass);
      m.dim = static_cast<std::size_t>(m.anharmonic.n_states);
      break;
    case ModelKind::semiclassical:
      dim_default(400);
      m.anharmonic.p = r.get_or("p", 4);
      m.mass = r.get_or("mass", 1.0);
      m.prefactor = r.get_or("prefactor", 1.0);
      if (m.anharmonic.p < 4 || m.anharmonic.p % 2) bad(r.where("p"), "must be an even integer >= 4");
      positive(r, "mass", m.mass);
      break;
    case ModelKind::random:
      dim_default(2000);
      m.bandwidth = r.get_or("bandwidth", 400.0);
      positive(r, "bandwidth", m.bandwidth);
      if (auto s = r.child("structure")) m.structure = parse_structure(*s);
      break;
    case ModelKind::xxz:
      m.chain.sites = r.get_or("sites", 12);
      m.chain.j1 = r.get_or("j1", 1.0);
      m.chain.j2 = r.get_or("j2", 0.0);
      m.chain.delta1 = r.get_or("delta1", 0.55);
      m.chain.delta2 = r.get_or("delta2", 0.5);
      m.chain.sz = r.get_or("sz", 0);
      m.keep_n = r.get<std::size_t>("keep_n");
      try {
        m.chain.validate();
      } catch (const Error& e) {
        bad(r.where("sites"), e.what());
      }
      if (m.keep_n && *m.keep_n == 0) bad(r.where("keep_n"), "must be > 0");
      break;
  }
  r.finish();
  return m;
}

json model_json(const ModelConfig& m) {
  json j{{"type", to_string(m.kind)}};
  switch (m.kind) {
    case ModelKind::harmonic:
      j.update({{"dim", m.dim}, {"mass", m.mass}, {"omega", m.omega},
                {"operator", to_string(m.harmonic_op)}, {"q", m.q}});
      break;
    case ModelKind::box1d:
      j.update({{"dim", m.dim}, {"length", m.length}, {"mass", m.mass}});
      break;
    case ModelKind::box2d:
      j.update({{"dims", m.dims}, {"lengths", m.lengths}, {"mass", m.mass}});
      break;
    case ModelKind::anharmonic:
      j.update({{"p", m.anharmonic.p}, {"grid_points", m.anharmonic.grid_points},
                {"halfwidth", m.anharmonic.grid_halfwidth ? json(*m.anharmonic.grid_halfwidth) : json()},
                {"mass", m.mass}, {"n_states", m.anharmonic.n_states},
                {"floor_rel", m.anharmonic.floor_rel},
                {"boundary_tolerance", m.anharmonic.boundary_tolerance}});
      break;
    case ModelKind::semiclassical:
      j.update({{"dim", m.dim}, {"p", m.anharmonic.p}, {"mass", m.mass}, {"prefactor", m.prefactor}});
      break;
    case ModelKind::random:
      j.update({{"dim", m.dim}, {"bandwidth", m.bandwidth}, {"structure", structure_json(m.structure)}});
      break;
    case ModelKind::xxz:
      j.update({{"sites", m.chain.sites}, {"j1", m.chain.j1}, {"j2", m.chain.j2},
                {"delta1", m.chain.delta1}, {"delta2", m.chain.delta2}, {"sz", m.chain.sz},
                {"keep_n", m.keep_n ? json(*m.keep_n) : json()}});
      break;
  }
  return j;
}

}  // namespace

const char* to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::harmonic: return "harmonic";
    case ModelKind::box1d: return "box1d";
    case ModelKind::box2d: return "box2d";
    case ModelKind::anharmonic: return "anharmonic";
    case ModelKind::semiclassical: return "semiclassical";
    case ModelKind::random: return "random";
    case ModelKind::xxz: return "xxz";
  }
  return "?";
}

std::vector<double> DynamicsConfig::grid() const {
  std::vector<double> t(t_points);
  for (std::size_t i = 0; i < t_points; ++i)
    t[i] = t_points == 1 ? 0.0 : t_max * static_cast<double>(i) / static_cast<double>(t_points - 1);
  return t;
}

RunConfig parse_config(const json& j) {
  Reader r(j, "");
  RunConfig c;
  auto model = r.child("model");
  if (!model) bad("model", "required");
  c.model = parse_model(*model);
  c.beta = r.get_or("beta", 1.0);
  positive(r, "beta", c.beta);
  c.seed = r.get_or<std::uint64_t>("seed", 1);
  c.output = r.get_or<std::string>("output", "out");

  if (auto l = r.child("lanczos")) {
    c.lanczos.n_max = l->get_or<std::size_t>("n_max", 40);
    positive(*l, "n_max", c.lanczos.n_max);
    c.lanczos.seeds = l->get_or<std::size_t>("seeds", 1);
    positive(*l, "seeds", c.lanczos.seeds);
    c.lanczos.options.reorthogonalize = l->get_or("reorthogonalize", true);
    try {
      c.lanczos.options.precision = parse_precision(l->get_or<std::string>("precision", "double"));
      c.lanczos.options.floor_policy = parse_floor_policy(l->get_or<std::string>("floor_policy", "zero"));
    } catch (const Error& e) {
      bad("lanczos", e.what());
    }
    c.lanczos.options.termination_tolerance = l->get_or("termination_tolerance", 1e-10);
    positive(*l, "termination_tolerance", c.lanczos.options.termination_tolerance);
    l->finish();
  }
  if (auto d = r.child("dynamics")) {
    c.dynamics.t_max = d->get_or("t_max", 5.0);
    c.dynamics.t_points = d->get_or<std::size_t>("t_points", 101);
    if (c.dynamics.t_max < 0.0) bad(d->where("t_max"), "must be >= 0");
    positive(*d, "t_points", c.dynamics.t_points);
    d->finish();
  }
  if (auto s = r.child("structure")) {
    if (auto e = s->get<std::array<double, 2>>("ebar")) {
      c.structure.options.ebar_lo = (*e)[0];
      c.structure.options.ebar_hi = (*e)[1];
    }
    c.structure.options.bin_width = s->get_or("bin_width", 0.0);
    c.structure.options.tie_tolerance = s->get_or("tie_tolerance", 1e-3);
    c.structure.options.min_pairs = s->get_or<std::size_t>("min_pairs", 100);
    s->finish();
  }
  if (auto a = r.child("analysis")) {
    if (auto w = a->get<std::array<std::size_t, 2>>("window")) {
      if ((*w)[0] < 1 || (*w)[1] < (*w)[0] + 5) bad(a->where("window"), "need 1 <= lo and hi >= lo + 5");
      c.analysis.window = std::make_pair((*w)[0], (*w)[1]);
    }
    c.analysis.tolerance = a->get_or("tolerance", 0.1);
    positive(*a, "tolerance", c.analysis.tolerance);
    if (auto e = a->child("expected")) c.analysis.expected = parse_structure(*e);
    a->finish();
  }
  if (auto s = r.child("sweep")) {
    c.sweep.beta = s->get_or("beta", std::vector<double>{});
    c.sweep.gamma = s->get_or("gamma", std::vector<double>{});
    c.sweep.p = s->get_or("p", std::vector<int>{});
    c.sweep.sites = s->get_or("sites", std::vector<int>{});
    for (double b : c.sweep.beta)
      if (!(b > 0.0)) bad(s->where("beta"), "values must be > 0");
    for (double g : c.sweep.gamma)
      if (!(g >= 0.0)) bad(s->where("gamma"), "values must be >= 0");
    s->finish();
  }
  r.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_config, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = model_json(c.model);
  j["beta"] = c.beta;
  j["seed"] = c.seed;
  j["output"] = c.output.string();
  j["lanczos"] = {{"n_max", c.lanczos.n_max},
                  {"seeds", c.lanczos.seeds},
                  {"reorthogonalize", c.lanczos.options.reorthogonalize},
                  {"precision", c.lanczos.options.precision == Precision::extended ? "extended" : "double"},
                  {"floor_policy", std::string(to_string(c.lanczos.options.floor_policy))},
                  {"termination_tolerance", c.lanczos.options.termination_tolerance}};
  j["dynamics"] = {{"t_max", c.dynamics.t_max}, {"t_points", c.dynamics.t_points}};
  json s{{"bin_width", c.structure.options.bin_width},
         {"tie_tolerance", c.structure.options.tie_tolerance},
         {"min_pairs", c.structure.options.min_pairs}};
  s["ebar"] = c.structure.options.ebar_lo && c.structure.options.ebar_hi
                  ? json::array({*c.structure.options.ebar_lo, *c.structure.options.ebar_hi})
                  : json();
  j["structure"] = s;
  json a{{"tolerance", c.analysis.tolerance}};
  a["window"] = c.analysis.window ? json::array({c.analysis.window->first, c.analysis.window->second}) : json();
  a["expected"] = c.analysis.expected ? structure_json(*c.analysis.expected) : json();
  j["analysis"] = a;
  j["sweep"] = {{"beta", c.sweep.beta}, {"gamma", c.sweep.gamma}, {"p", c.sweep.p}, {"sites", c.sweep.sites}};
  return j;
}

}  // namespace opgrowth::cli
