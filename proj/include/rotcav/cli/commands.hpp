#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rotcav/analytic.hpp"
#include "rotcav/arrowhead.hpp"
#include "rotcav/cli/config.hpp"
#include "rotcav/cli/output.hpp"
#include "rotcav/dynamics.hpp"
#include "rotcav/molecule.hpp"

namespace rotcav::cli {

struct Sweep {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;

  double value(std::size_t i) const {
    return count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  unsigned threads = 1;
  std::optional<Sweep> sweep;
};

inline constexpr double level_tolerance = 1e-9;
inline constexpr double agreement_tolerance = 1e-10;
inline constexpr std::size_t dense_dim_limit = 3001;

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must go to
/// disjoint slots so the output order never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- spectrum

struct SpectrumRow {
  std::string label;
  double energy;
  std::size_t multiplicity;
  std::string source;
};

struct SpectrumResult {
  std::vector<SpectrumRow> rows;
  double analytic_vs_dense = std::numeric_limits<double>::quiet_NaN();
  double arrowhead_vs_dense = std::numeric_limits<double>::quiet_NaN();
  double analytic_vs_arrowhead = std::numeric_limits<double>::quiet_NaN();
  bool has_analytic = false;
  bool has_dense = false;
};

inline void push_levels(std::vector<SpectrumRow>& rows, const std::vector<double>& values, const std::string& label,
                        const std::string& source) {
  for (const auto& l : group_levels(values, level_tolerance)) rows.push_back({label, l.energy, l.multiplicity, source});
}

inline SpectrumResult compute_spectrum(const CavitySpec& cav, const RotationSpec& rot, int n) {
  SpectrumResult res;
  const EnsembleSpec ens{n};

  std::vector<double> analytic;
  if (cav.detuning == 0.0) {
    const auto p = predict_spectrum(cav, rot, n);
    res.has_analytic = true;
    for (double e : p.branch_energies) res.rows.push_back({"branch", e, 1, "analytic"});
    for (const auto& l : p.dark_levels) res.rows.push_back({"dark", l.energy, l.multiplicity, "analytic"});
    const char* extra = rot.omega() == 0.0 ? "uncoupled" : "entangled";
    for (const auto& l : p.entangled) res.rows.push_back({extra, l.energy, l.multiplicity, "analytic"});
    analytic = p.multiset();
  }

  std::vector<double> dense;
  if (static_cast<std::size_t>(3 * n + 1) <= dense_dim_limit) {
    dense = eigenvalues_dense(build_ensemble_lab(cav, rot, ens));
    res.has_dense = true;
    push_levels(res.rows, dense, "level", "dense");
  }

  std::vector<double> arrow;
  std::size_t extra_count = 0;
  std::string extra_label;
  SecularSolution sol;
  if (rot.omega() == 0.0) {
    sol = eigensolve_arrowhead(build_nonrotating(cav, ens));
    extra_count = 2 * static_cast<std::size_t>(n);
    extra_label = "uncoupled";
  } else {
    sol = eigensolve_arrowhead(build_ensemble(cav, rot, ens));
    if (rot.is_planar()) {
      extra_count = static_cast<std::size_t>(n);
      extra_label = "entangled";
    }
  }
  std::vector<double> roots, deflated;
  for (std::size_t i = 0; i < sol.eigenvalues.size(); ++i)
    (sol.deflated[i] ? deflated : roots).push_back(sol.eigenvalues[i]);
  push_levels(res.rows, roots, "root", "arrowhead");
  push_levels(res.rows, deflated, "deflated", "arrowhead");
  if (extra_count) res.rows.push_back({extra_label, cav.excited(), extra_count, "arrowhead"});
  arrow = sol.eigenvalues;
  arrow.insert(arrow.end(), extra_count, cav.excited());

  if (res.has_dense) {
    res.arrowhead_vs_dense = multiset_deviation(arrow, dense);
    if (res.has_analytic) res.analytic_vs_dense = multiset_deviation(analytic, dense);
  }
  if (res.has_analytic) res.analytic_vs_arrowhead = multiset_deviation(analytic, arrow);
  return res;
}

inline bool spectrum_agrees(const SpectrumResult& r) {
  for (double d : {r.analytic_vs_dense, r.arrowhead_vs_dense, r.analytic_vs_arrowhead})
    if (!std::isnan(d) && !(d <= agreement_tolerance)) return false;
  return true;
}

inline json spectrum_diff_json(const SpectrumResult& r) {
  return {{"analytic_vs_dense", num(r.analytic_vs_dense)},
          {"arrowhead_vs_dense", num(r.arrowhead_vs_dense)},
          {"analytic_vs_arrowhead", num(r.analytic_vs_arrowhead)},
          {"tolerance", agreement_tolerance},
          {"agree", spectrum_agrees(r)}};
}

inline void apply_sweep_value(RunConfig& cfg, const std::string& param, double v) {
  if (param == "omega") {
    require(v >= 0.0, Errc::ConfigError, "sweep: omega must be >= 0");
    cfg.omega = v;
  } else if (param == "g") {
    require(v >= 0.0, Errc::ConfigError, "sweep: g must be >= 0");
    cfg.cavity.g = v;
  } else if (param == "omega_c") {
    require(v > 0.0, Errc::ConfigError, "sweep: omega_c must be > 0");
    cfg.cavity.omega_c = v;
  } else {
    throw Error(Errc::ConfigError, "sweep: unknown parameter '" + param + "' (expected omega, g or omega_c)");
  }
}

/// Exit code 0 when analytic, dense and arrowhead agree, 1 otherwise.
inline int cmd_spectrum(const RunConfig& cfg, const RunOptions& opt) {
  if (!opt.sweep) {
    const auto r = compute_spectrum(cfg.cavity, cfg.rotation(), cfg.n_atoms);
    CsvWriter csv({"label", "energy", "multiplicity", "source"});
    for (const auto& row : r.rows) csv.row({row.label, fmt(row.energy), std::to_string(row.multiplicity), row.source});
    write_file(opt.out_dir / "spectrum.csv", csv.str());
    json diff = spectrum_diff_json(r);
    diff["n_atoms"] = cfg.n_atoms;
    write_json(opt.out_dir / "spectrum_diff.json", diff);
    return spectrum_agrees(r) ? 0 : 1;
  }

  const Sweep& s = *opt.sweep;
  std::vector<SpectrumResult> results(s.count);
  parallel_for(s.count, opt.threads, [&](std::size_t i) {
    RunConfig c = cfg;
    apply_sweep_value(c, s.param, s.value(i));
    results[i] = compute_spectrum(c.cavity, c.rotation(), c.n_atoms);
  });
  CsvWriter csv({s.param, "label", "energy", "multiplicity", "source"});
  json points = json::array();
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < s.count; ++i) {
    for (const auto& row : results[i].rows)
      csv.row({fmt(s.value(i)), row.label, fmt(row.energy), std::to_string(row.multiplicity), row.source});
    json d = spectrum_diff_json(results[i]);
    d[s.param] = s.value(i);
    points.push_back(d);
    ok = ok && spectrum_agrees(results[i]);
    for (double x : {results[i].analytic_vs_dense, results[i].arrowhead_vs_dense, results[i].analytic_vs_arrowhead})
      if (!std::isnan(x)) worst = std::max(worst, x);
  }
  write_file(opt.out_dir / "spectrum.csv", csv.str());
  write_json(opt.out_dir / "spectrum_diff.json", {{"sweep", s.param},
                                                  {"n_atoms", cfg.n_atoms},
                                                  {"max_deviation", worst},
                                                  {"tolerance", agreement_tolerance},
                                                  {"agree", ok},
                                                  {"points", points}});
  return ok ? 0 : 1;
}

// -------------------------------------------------------------- darkstates

struct CensusEntry {
  double energy;
  std::size_t multiplicity;
  std::string kind;
};

/// Compares the predicted dark-state census with the dense spectrum.
/// Exit code 1 on any mismatch.
inline int cmd_darkstates(const RunConfig& cfg, const RunOptions& opt) {
  const auto rot = cfg.rotation();
  const int n = cfg.n_atoms;
  const auto p = predict_spectrum(cfg.cavity, rot, n);
  std::string axis_case = rot.omega() == 0.0 ? "nonrotating" : rot.is_planar() ? "xy" : "general";

  std::vector<CensusEntry> census;
  for (const auto& l : p.dark_levels) census.push_back({l.energy, l.multiplicity, "collective"});
  for (const auto& l : p.entangled)
    census.push_back({l.energy, l.multiplicity, rot.omega() == 0.0 ? "uncoupled" : "entangled"});
  if (cfg.darkstates.inject_mismatch) {
    if (census.empty())
      census.push_back({cfg.cavity.omega_c, 1, "injected"});
    else
      census.front().multiplicity += 1;
  }

  const auto dense = eigenvalues_dense(build_ensemble_lab(cfg.cavity, rot, {n}));
  auto count_near = [](const std::vector<double>& v, double e) {
    return static_cast<std::size_t>(
        std::count_if(v.begin(), v.end(), [e](double x) { return std::abs(x - e) <= level_tolerance; }));
  };

  std::vector<double> predicted = p.branch_energies;
  for (const auto& c : census) predicted.insert(predicted.end(), c.multiplicity, c.energy);
  bool match = predicted.size() == dense.size();
  const double deviation = match ? multiset_deviation(predicted, dense) : std::numeric_limits<double>::infinity();
  match = match && deviation <= agreement_tolerance;

  json checks = json::array();
  std::vector<double> energies;
  for (const auto& c : census) energies.push_back(c.energy);
  for (const auto& lvl : group_levels(energies, level_tolerance)) {
    std::size_t expected = count_near(p.branch_energies, lvl.energy);
    for (const auto& c : census)
      if (std::abs(c.energy - lvl.energy) <= level_tolerance) expected += c.multiplicity;
    const std::size_t found = count_near(dense, lvl.energy);
    match = match && expected == found;
    checks.push_back({{"energy", lvl.energy}, {"expected", expected}, {"found", found}});
  }

  json cj = json::array();
  for (const auto& c : census) cj.push_back({{"energy", c.energy}, {"multiplicity", c.multiplicity}, {"kind", c.kind}});
  write_json(opt.out_dir / "darkstates.json", {{"n_atoms", n},
                                               {"axis_case", axis_case},
                                               {"branches", p.branch_energies},
                                               {"census", cj},
                                               {"checks", checks},
                                               {"total_states", dense.size()},
                                               {"multiset_deviation", num(deviation)},
                                               {"match", match}});
  return match ? 0 : 1;
}

// -------------------------------------------------------------------- scan

inline json shift_report_json(const ShiftComparisonReport& r) {
  auto mat = [](const Eigen::Matrix2d& m) {
    return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
  };
  auto comp = [](const ShiftComparisonReport::Component& c) {
    return json{{"present", c.present},
                {"ratio", c.present ? num(c.ratio) : json(nullptr)},
                {"residual", c.present ? num(c.residual) : json(nullptr)},
                {"classification", c.classification}};
  };
  return {{"grid", {{"theta_points", r.n_theta}, {"phi_points", r.n_phi}}},
          {"tolerance", r.tolerance},
          {"max_abs_diff", r.max_abs_diff},
          {"agree", r.agree},
          {"worst_point", {{"theta", r.worst_theta}, {"phi", r.worst_phi}}},
          {"builder_pi_block", mat(r.builder_at_worst)},
          {"oracle_pi_block", mat(r.oracle_at_worst)},
          {"axial", comp(r.axial)},
          {"planar", comp(r.planar)}};
}

inline int cmd_scan(const RunConfig& cfg, const RunOptions& opt) {
  const auto& model = *cfg.molecule;
  const auto& s = *cfg.scan;
  const auto rot = cfg.rotation();
  ScanOptions so;
  so.threads = opt.threads;
  const auto rg = s.r.grid(), tg = s.theta.grid(), pg = s.phi.grid();
  const auto scan = adiabatic_scan(model, rot, rg, tg, pg, so);
  const auto still = adiabatic_scan(model, RotationSpec::about_z(0.0), rg, tg, pg, so);

  CsvWriter csv({"r", "theta", "phi", "e1", "e2", "e3"});
  CsvWriter diff({"r", "theta", "phi", "d1", "d2", "d3"});
  double max_diff = 0.0;
  for (std::size_t ir = 0; ir < rg.values.size(); ++ir)
    for (std::size_t it = 0; it < tg.values.size(); ++it)
      for (std::size_t ip = 0; ip < pg.values.size(); ++ip) {
        const auto& e = scan.at(ir, it, ip);
        const auto& e0 = still.at(ir, it, ip);
        const std::string r = fmt(rg.values[ir]), t = fmt(tg.values[it]), ph = fmt(pg.values[ip]);
        csv.row({r, t, ph, fmt(e[0]), fmt(e[1]), fmt(e[2])});
        diff.row({r, t, ph, fmt(e[0] - e0[0]), fmt(e[1] - e0[1]), fmt(e[2] - e0[2])});
        for (int k = 0; k < 3; ++k) max_diff = std::max(max_diff, std::abs(e[k] - e0[k]));
      }
  const auto jumps = scan_jumps(scan, s.jump_bound);
  write_file(opt.out_dir / "scan.csv", csv.str());
  write_file(opt.out_dir / "scan_diff.csv", diff.str());
  write_json(opt.out_dir / "scan_summary.json", {{"points", scan.energies.size()},
                                                 {"max_abs_rotation_shift", max_diff},
                                                 {"jump_bound", s.jump_bound},
                                                 {"jumps_flagged", jumps.size()}});
  write_json(opt.out_dir / "shift_comparison.json", shift_report_json(compare_rotation_shifts(rot)));
  return 0;
}

// -------------------------------------------------------------------- lici

/// Exit code 1 when a configured expected count is missed; NoCrossing
/// propagates after its record is written.
inline int cmd_lici(const RunConfig& cfg, const RunOptions& opt) {
  const auto& model = *cfg.molecule;
  const LiciSettings s = cfg.lici.value_or(LiciSettings{});
  const auto [lo, hi] = s.r_window.value_or(std::pair{model.r_min, model.r_max});
  LiciResult res;
  try {
    res = find_licis(model, cfg.rotation(), lo, hi, s.options);
  } catch (const Error& e) {
    if (e.code() == Errc::NoCrossing)
      write_json(opt.out_dir / "lici.json",
                 {{"error", "NoCrossing"}, {"message", e.what()}, {"r_window", {lo, hi}}, {"points", json::array()}});
    throw;
  }
  json points = json::array();
  bool certified = true;
  for (const auto& p : res.points) {
    points.push_back({{"r", p.r},
                      {"theta", p.theta},
                      {"branch", to_string(p.branch)},
                      {"gap", p.gap},
                      {"seam_max_gap", p.seam.max_gap},
                      {"phi_grid_size", p.seam.phi.size()}});
    certified = certified && p.seam.certified;
  }
  const auto distinct = res.distinct_r();
  json out{{"r_window", {lo, hi}},
           {"points", points},
           {"distinct_r", distinct},
           {"seams_certified", certified},
           {"warnings", res.warnings}};
  bool ok = certified;
  if (s.expected_r_count) {
    const bool count_ok = distinct.size() == *s.expected_r_count;
    out["expected_r_count"] = *s.expected_r_count;
    out["count_ok"] = count_ok;
    ok = ok && count_ok;
  }
  write_json(opt.out_dir / "lici.json", out);
  return ok ? 0 : 1;
}

// --------------------------------------------------------------- propagate

/// StabilityViolation propagates (exit 4) after a diagnostic summary is written.
inline int cmd_propagate(const RunConfig& cfg, const RunOptions& opt) {
  const auto& model = *cfg.molecule;
  const auto& p = *cfg.propagation;
  const auto rot = cfg.rotation();
  const auto h = assemble_hamiltonian_reduced(model, rot, p.grid, p.angles, p.assemble);
  const SpectralPropagator prop(h, p.grid);
  const auto psi0 = gaussian_wavepacket(p.grid, p.initial.center, p.initial.width, p.initial.momentum,
                                        p.initial.channel);

  double dt = p.dt;
  std::size_t steps = p.n_steps;
  int halvings = 0;
  if (p.auto_halve) {
    while (dt * prop.spectral_radius() > p.options.max_step_phase && halvings < 60) {
      dt *= 0.5;
      steps *= 2;
      ++halvings;
    }
  }

  Trajectory tr;
  try {
    tr = prop.propagate(psi0, dt, steps, p.options);
  } catch (const Error& e) {
    if (e.code() == Errc::StabilityViolation)
      write_json(opt.out_dir / "summary.json", {{"error", "StabilityViolation"},
                                                {"message", e.what()},
                                                {"dt", dt},
                                                {"n_steps", steps},
                                                {"spectral_radius", prop.spectral_radius()},
                                                {"max_step_phase", num(p.options.max_step_phase)},
                                                {"norm_tolerance", p.options.max_norm_drift}});
    throw;
  }

  CsvWriter csv({"t", "norm", "energy", "pop_sigma", "pop_pi_plus", "pop_pi_minus", "r_mean_sigma", "r_mean_pi_plus",
                 "r_mean_pi_minus", "fidelity"});
  const std::size_t stride = p.output_every << halvings;
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    if (i % stride != 0 && i + 1 != tr.steps.size()) continue;
    const auto& o = tr.steps[i];
    csv.row({fmt(o.t), fmt(o.norm), fmt(o.energy), fmt(o.population[0]), fmt(o.population[1]), fmt(o.population[2]),
             fmt(o.r_mean[0]), fmt(o.r_mean[1]), fmt(o.r_mean[2]), fmt(o.fidelity)});
  }
  write_file(opt.out_dir / "trajectory.csv", csv.str());

  const double t_end = tr.final_state.time;
  const auto lab = frame_transform(tr.final_state, rot, p.angles, t_end, FrameDirection::ToLab);
  const auto back = frame_transform(lab, rot, p.angles, t_end, FrameDirection::ToRotating);
  const auto& last = tr.steps.back();
  write_json(opt.out_dir / "summary.json",
             {{"dt", dt},
              {"n_steps", steps},
              {"halvings", halvings},
              {"spectral_radius", prop.spectral_radius()},
              {"initial_energy", tr.steps.front().energy},
              {"norm_drift", tr.norm_drift},
              {"energy_drift", tr.energy_drift},
              {"final_time", t_end},
              {"final_populations", {last.population[0], last.population[1], last.population[2]}},
              {"final_fidelity", last.fidelity},
              {"lab_frame_populations", {lab.population(0), lab.population(1), lab.population(2)}},
              {"frame_round_trip_fidelity", std::abs(tr.final_state.overlap(back))}});
  return 0;
}

// ------------------------------------------------------------------- bench

/// Arrowhead instance with `n` shaft entries built from the configured cavity
/// and rotation (ensemble size chosen to match).
inline ArrowheadMatrix bench_instance(const CavitySpec& cav, const RotationSpec& rot, std::size_t n) {
  if (rot.omega() == 0.0) return build_nonrotating(cav, {static_cast<int>(n)});
  const std::size_t per_atom = rot.is_planar() ? 2 : 3;
  return build_ensemble(cav, rot, {static_cast<int>(std::max<std::size_t>(1, n / per_atom))});
}

inline int cmd_bench(const RunConfig& cfg, const RunOptions& opt) {
  const auto rot = cfg.rotation();
  const auto rows = benchmark_scaling(
      cfg.bench.sizes, [&](std::size_t n) { return bench_instance(cfg.cavity, rot, n); }, cfg.bench.options);
  const double bound = agreement_tolerance * bench_instance(cfg.cavity, rot, 3).scale();
  CsvWriter csv({"n", "time_arrowhead_s", "time_dense_s", "max_abs_eig_diff"});
  bool ok = true;
  for (const auto& r : rows) {
    csv.row({std::to_string(r.n), fmt(r.time_arrowhead_s), fmt(r.time_dense_s), fmt(r.max_abs_eig_diff)});
    if (!std::isnan(r.max_abs_eig_diff)) ok = ok && r.max_abs_eig_diff <= bound;
  }
  write_file(opt.out_dir / "bench.csv", csv.str());
  write_json(opt.out_dir / "bench.json",
             {{"scaling_exponent", rows.size() >= 2 ? num(fit_scaling_exponent(rows)) : json(nullptr)},
              {"dense_agrees", ok}});
  return ok ? 0 : 1;
}

}  // namespace rotcav::cli
