#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotcav/atom_cavity.hpp"
#include "rotcav/dynamics.hpp"
#include "rotcav/molecule.hpp"

namespace rotcav::cli {

using json = nlohmann::json;

/// Reads one JSON object, tracking which keys were consumed so that leftovers
/// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "top level must be an object" : "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key, fallback.has_value());
    if (!v) return *fallback;
    if (!v->is_number()) fail_key(key, "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail_key(key, "must be finite");
    return x;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
    const json* v = find(key, fallback.has_value());
    if (!v) return *fallback;
    if (!v->is_number_integer()) fail_key(key, "expected an integer");
    return v->get<std::int64_t>();
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    const auto x = integer(key, fallback ? std::optional<std::int64_t>(static_cast<std::int64_t>(*fallback))
                                         : std::nullopt);
    if (x < 0) fail_key(key, "must be non-negative");
    return static_cast<std::size_t>(x);
  }

  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) {
    const json* v = find(key, fallback.has_value());
    if (!v) return *fallback;
    if (!v->is_boolean()) fail_key(key, "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = find(key, fallback.has_value());
    if (!v) return *fallback;
    if (!v->is_string()) fail_key(key, "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected_size = 0) {
    const json* v = find(key, false);
    if (!v->is_array()) fail_key(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) fail_key(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    if (expected_size && out.size() != expected_size)
      fail_key(key, "expected " + std::to_string(expected_size) + " entries");
    return out;
  }

  const json& raw(const std::string& key) {
    return *find(key, false);
  }

  ObjectReader child(const std::string& key) { return ObjectReader(*find(key, false), join(key)); }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }

  /// Rejects every key that was never read.
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw Error(Errc::ConfigError, "config: unknown key '" + join(k) + "'");
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    throw Error(Errc::ConfigError, "config: key '" + join(key) + "': " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ConfigError, "config: " + (path_.empty() ? std::string() : "key '" + path_ + "': ") + msg);
  }

 private:
  const json* find(const std::string& key, bool optional) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (optional) return nullptr;
      fail_key(key, "required");
    }
    return &j_.at(key);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

struct RangeSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;

  AxisGrid grid() const { return AxisGrid::linspace(start, stop, count); }
};

struct ScanSettings {
  RangeSpec r, theta, phi;
  double jump_bound = 0.1;
};

struct LiciSettings {
  std::optional<std::pair<double, double>> r_window;
  LiciOptions options;
  std::optional<std::size_t> expected_r_count;
};

struct InitialState {
  double center = 0.0;
  double width = 0.5;
  double momentum = 0.0;
  std::size_t channel = 0;
};

struct PropagationSettings {
  RadialGrid grid;
  FrozenAngleConfig angles;
  AssembleOptions assemble;
  double dt = 0.01;
  std::size_t n_steps = 100;
  std::size_t output_every = 1;
  InitialState initial;
  PropagationOptions options;
  bool auto_halve = false;
};

struct BenchSettings {
  std::vector<std::size_t> sizes{1000, 10000, 100000};
  BenchmarkOptions options;
};

struct DarkSettings {
  bool inject_mismatch = false;
};

enum class SystemKind { Atom, Ensemble, Diatomic };

inline std::string_view to_string(SystemKind s) {
  switch (s) {
    case SystemKind::Atom: return "atom";
    case SystemKind::Ensemble: return "ensemble";
    case SystemKind::Diatomic: return "diatomic";
  }
  return "?";
}

/// Parsed and schema-checked run configuration.
struct RunConfig {
  SystemKind system = SystemKind::Atom;
  std::uint64_t seed = 0;
  CavitySpec cavity;
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double omega = 0.0;
  int n_atoms = 1;
  std::optional<DiatomicModel> molecule;
  std::optional<ScanSettings> scan;
  std::optional<LiciSettings> lici;
  std::optional<PropagationSettings> propagation;
  BenchSettings bench;
  DarkSettings darkstates;
  std::string output_dir = "out";

  RotationSpec rotation() const { return RotationSpec(axis, omega); }
};

namespace detail {

inline RangeSpec read_range(ObjectReader obj) {
  RangeSpec r;
  r.start = obj.number("start");
  r.stop = obj.number("stop", r.start);
  r.count = obj.count("count", 1);
  if (r.count < 1) obj.fail_key("count", "must be >= 1");
  if (r.count > 1 && !(r.stop > r.start)) obj.fail_key("stop", "must exceed start when count > 1");
  obj.finish();
  return r;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() ? p : base / p;
}

inline CubicSpline read_table(ObjectReader& obj, const std::filesystem::path& base) {
  const std::string file = obj.string("file");
  try {
    return read_two_column_table(resolve(base, file).string());
  } catch (const Error& e) {
    obj.fail_key("file", e.what());
  }
}

inline PotentialCurve read_curve(ObjectReader obj, const std::filesystem::path& base) {
  const std::string kind = obj.string("kind");
  PotentialCurve c = PotentialCurve::constant(0.0);
  if (kind == "harmonic") {
    c = PotentialCurve::harmonic(obj.number("k"), obj.number("r0"), obj.number("offset", 0.0));
  } else if (kind == "morse") {
    c = PotentialCurve::morse(obj.number("depth"), obj.number("a"), obj.number("r0"), obj.number("offset", 0.0));
  } else if (kind == "constant") {
    c = PotentialCurve::constant(obj.number("value"));
  } else if (kind == "tabulated") {
    c = PotentialCurve::tabulated(read_table(obj, base));
  } else {
    obj.fail_key("kind", "expected harmonic, morse, constant or tabulated");
  }
  obj.finish();
  return c;
}

inline TransitionDipole read_dipole(ObjectReader obj, const std::filesystem::path& base) {
  const std::string kind = obj.string("kind");
  std::optional<TransitionDipole> d;
  if (kind == "constant") {
    d = TransitionDipole::constant(obj.number("value"));
  } else if (kind == "tabulated") {
    d = TransitionDipole::tabulated(read_table(obj, base));
  } else {
    obj.fail_key("kind", "expected constant or tabulated");
  }
  obj.finish();
  return *d;
}

inline void read_rotation(ObjectReader obj, RunConfig& cfg) {
  cfg.omega = obj.number("omega");
  if (cfg.omega < 0.0) obj.fail_key("omega", "must be >= 0");
  const json& axis = obj.raw("axis");
  if (axis.is_string()) {
    const std::string a = axis.get<std::string>();
    if (a == "X" || a == "x") cfg.axis = {1, 0, 0};
    else if (a == "Y" || a == "y") cfg.axis = {0, 1, 0};
    else if (a == "Z" || a == "z") cfg.axis = {0, 0, 1};
    else obj.fail_key("axis", "expected X, Y, Z, a 3-vector or {\"xy\": angle}");
  } else if (axis.is_array()) {
    const auto v = obj.numbers("axis", 3);
    if (std::hypot(v[0], v[1], v[2]) == 0.0) obj.fail_key("axis", "must be nonzero");
    cfg.axis = {v[0], v[1], v[2]};
  } else if (axis.is_object()) {
    ObjectReader xy(axis, obj.join("axis"));
    const double alpha = xy.number("xy");
    xy.finish();
    cfg.axis = {std::cos(alpha), std::sin(alpha), 0.0};
  } else {
    obj.fail_key("axis", "expected X, Y, Z, a 3-vector or {\"xy\": angle}");
  }
  obj.finish();
}

inline DiatomicModel read_molecule(ObjectReader obj, const CavitySpec& cavity, const std::filesystem::path& base) {
  DiatomicModel m;
  m.v_sigma = read_curve(obj.child("v_sigma"), base);
  m.v_pi = read_curve(obj.child("v_pi"), base);
  m.dipole = obj.has("dipole") ? read_dipole(obj.child("dipole"), base) : TransitionDipole::constant(1.0);
  m.g0 = obj.number("g0");
  m.reduced_mass = obj.number("reduced_mass", 1.0);
  m.r_min = obj.number("r_min");
  m.r_max = obj.number("r_max");
  m.cavity = cavity;
  obj.finish();
  try {
    m.validate();
  } catch (const Error& e) {
    obj.fail(e.what());
  }
  return m;
}

inline ScanSettings read_scan(ObjectReader obj) {
  ScanSettings s;
  s.r = read_range(obj.child("r"));
  s.theta = read_range(obj.child("theta"));
  s.phi = read_range(obj.child("phi"));
  s.jump_bound = obj.number("jump_bound", 0.1);
  if (!(s.jump_bound > 0.0)) obj.fail_key("jump_bound", "must be > 0");
  obj.finish();
  return s;
}

inline LiciSettings read_lici(ObjectReader obj) {
  LiciSettings s;
  if (obj.has("r_window")) {
    const auto w = obj.numbers("r_window", 2);
    if (!(w[1] > w[0])) obj.fail_key("r_window", "must be [lo, hi] with lo < hi");
    s.r_window = std::pair{w[0], w[1]};
  }
  s.options.samples = obj.count("samples", 512);
  s.options.phi_points = obj.count("phi_points", 64);
  s.options.tolerance = obj.number("tolerance", 1e-10);
  if (s.options.samples < 2) obj.fail_key("samples", "must be >= 2");
  if (s.options.phi_points < 1) obj.fail_key("phi_points", "must be >= 1");
  if (!(s.options.tolerance > 0.0)) obj.fail_key("tolerance", "must be > 0");
  if (obj.has("expected_r_count")) s.expected_r_count = obj.count("expected_r_count");
  obj.finish();
  return s;
}

inline std::size_t read_channel(ObjectReader& obj) {
  const std::string c = obj.string("channel", "sigma");
  if (c == "sigma") return 0;
  if (c == "pi_plus") return 1;
  if (c == "pi_minus") return 2;
  obj.fail_key("channel", "expected sigma, pi_plus or pi_minus");
}

inline PropagationSettings read_propagation(ObjectReader obj, double reduced_mass) {
  PropagationSettings p;
  {
    auto g = obj.child("grid");
    p.grid.r_min = g.number("r_min");
    p.grid.r_max = g.number("r_max");
    p.grid.n_points = g.count("n_points");
    p.grid.reduced_mass = reduced_mass;
    g.finish();
    try {
      p.grid.validate();
    } catch (const Error& e) {
      g.fail(e.what());
    }
  }
  p.angles.theta = obj.number("theta", 0.0);
  p.angles.phi = obj.number("phi", 0.0);
  p.angles.include_centrifugal = obj.boolean("include_centrifugal", false);
  if (obj.has("frozen_l")) {
    const auto l = obj.numbers("frozen_l", 3);
    p.angles.frozen_l = Eigen::Vector3d(l[0], l[1], l[2]);
  }
  try {
    p.angles.validate();
  } catch (const Error& e) {
    obj.fail(e.what());
  }
  if (obj.has("max_dr")) p.assemble.max_dr = obj.number("max_dr");
  p.dt = obj.number("dt");
  if (!(p.dt > 0.0)) obj.fail_key("dt", "must be > 0");
  p.n_steps = obj.count("n_steps");
  p.output_every = obj.count("output_every", 1);
  if (p.output_every < 1) obj.fail_key("output_every", "must be >= 1");
  {
    auto init = obj.child("initial");
    p.initial.center = init.number("center");
    p.initial.width = init.number("width");
    p.initial.momentum = init.number("momentum", 0.0);
    p.initial.channel = read_channel(init);
    if (!(p.initial.width > 0.0)) init.fail_key("width", "must be > 0");
    init.finish();
  }
  if (obj.has("max_step_phase")) {
    p.options.max_step_phase = obj.number("max_step_phase");
    if (!(p.options.max_step_phase > 0.0)) obj.fail_key("max_step_phase", "must be > 0");
  }
  p.options.max_norm_drift = obj.number("norm_tolerance", 1e-10);
  if (!(p.options.max_norm_drift > 0.0)) obj.fail_key("norm_tolerance", "must be > 0");
  p.auto_halve = obj.boolean("auto_halve", false);
  obj.finish();
  return p;
}

inline BenchSettings read_bench(ObjectReader obj) {
  BenchSettings b;
  if (obj.has("sizes")) {
    b.sizes.clear();
    for (double s : obj.numbers("sizes")) {
      if (!(s >= 3.0) || s != std::floor(s)) obj.fail_key("sizes", "entries must be integers >= 3");
      b.sizes.push_back(static_cast<std::size_t>(s));
    }
    if (b.sizes.empty() || !std::is_sorted(b.sizes.begin(), b.sizes.end()))
      obj.fail_key("sizes", "must be a non-empty ascending list");
  }
  b.options.dense_limit = obj.count("dense_limit", 2000);
  b.options.min_timing_s = obj.number("min_timing_s", 0.02);
  obj.finish();
  return b;
}

}  // namespace detail

/// Builds a RunConfig from parsed JSON; relative table paths resolve against `base`.
inline RunConfig parse_config(const json& j, const std::filesystem::path& base = ".") {
  ObjectReader top(j, "");
  RunConfig cfg;
  const std::string system = top.string("system");
  if (system == "atom") cfg.system = SystemKind::Atom;
  else if (system == "ensemble") cfg.system = SystemKind::Ensemble;
  else if (system == "diatomic") cfg.system = SystemKind::Diatomic;
  else top.fail_key("system", "expected atom, ensemble or diatomic");

  const auto seed = top.integer("seed", 0);
  if (seed < 0) top.fail_key("seed", "must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);

  {
    auto c = top.child("cavity");
    cfg.cavity.omega_c = c.number("omega_c");
    cfg.cavity.g = c.number("g", 0.0);
    cfg.cavity.detuning = c.number("detuning", 0.0);
    c.finish();
    try {
      cfg.cavity.validate();
    } catch (const Error& e) {
      c.fail(e.what());
    }
  }
  if (top.has("rotation")) detail::read_rotation(top.child("rotation"), cfg);

  if (top.has("ensemble")) {
    auto e = top.child("ensemble");
    const auto n = e.integer("n_atoms");
    if (n < 1 || n > 10'000'000) e.fail_key("n_atoms", "must be in [1, 1e7]");
    cfg.n_atoms = static_cast<int>(n);
    e.finish();
  }
  if (cfg.system == SystemKind::Atom && cfg.n_atoms != 1) top.fail_key("ensemble", "an atom system has n_atoms = 1");

  if (top.has("molecule")) cfg.molecule = detail::read_molecule(top.child("molecule"), cfg.cavity, base);
  if (top.has("scan")) cfg.scan = detail::read_scan(top.child("scan"));
  if (top.has("lici")) cfg.lici = detail::read_lici(top.child("lici"));
  if (top.has("propagation")) {
    if (!cfg.molecule) top.fail_key("propagation", "requires a molecule section");
    cfg.propagation = detail::read_propagation(top.child("propagation"), cfg.molecule->reduced_mass);
  }
  if (top.has("bench")) cfg.bench = detail::read_bench(top.child("bench"));
  if (top.has("darkstates")) {
    auto d = top.child("darkstates");
    cfg.darkstates.inject_mismatch = d.boolean("inject_mismatch", false);
    d.finish();
  }
  cfg.output_dir = top.string("output_dir", "out");
  top.finish();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::ConfigError, "config: cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, "config: " + path + ": " + e.what());
  }
  return parse_config(j, std::filesystem::path(path).parent_path());
}

}  // namespace rotcav::cli
