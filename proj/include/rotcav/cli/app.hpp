#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotcav/cli/commands.hpp"
#include "rotcav/cli/config.hpp"

namespace rotcav::cli {

enum ExitCode : int { Ok = 0, NumericFailure = 1, ValidationFailure = 2, NoCrossingFound = 3, Unstable = 4 };

inline Sweep parse_sweep(const std::vector<std::string>& args) {
  require(args.size() == 2, Errc::ConfigError, "--sweep expects <param> <start:stop:count>");
  Sweep s;
  s.param = args[0];
  const std::string& spec = args[1];
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  require(c2 != std::string::npos && spec.find(':', c2 + 1) == std::string::npos, Errc::ConfigError,
          "--sweep range must look like start:stop:count, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const std::string a = spec.substr(0, c1), b = spec.substr(c1 + 1, c2 - c1 - 1), c = spec.substr(c2 + 1);
    s.start = std::stod(a, &used);
    require(used == a.size(), Errc::ConfigError, "bad start");
    s.stop = std::stod(b, &used);
    require(used == b.size(), Errc::ConfigError, "bad stop");
    const long long n = std::stoll(c, &used);
    require(used == c.size() && n >= 1, Errc::ConfigError, "bad count");
    s.count = static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw Error(Errc::ConfigError, "--sweep range must look like start:stop:count, got '" + spec + "'");
  }
  require(std::isfinite(s.start) && std::isfinite(s.stop), Errc::ConfigError, "--sweep bounds must be finite");
  return s;
}

/// Checks everything a command needs before any file is written.
inline void validate_for(const std::string& command, const RunConfig& cfg, const RunOptions& opt) {
  const bool atoms = cfg.system != SystemKind::Diatomic;
  auto need = [](bool cond, const std::string& msg) { require(cond, Errc::ConfigError, "config: " + msg); };
  if (opt.sweep) {
    need(command == "spectrum", "--sweep is supported by the spectrum command only");
    for (std::size_t i = 0; i < opt.sweep->count; ++i) {
      RunConfig c = cfg;
      apply_sweep_value(c, opt.sweep->param, opt.sweep->value(i));
    }
  }
  if (command == "spectrum" || command == "darkstates" || command == "bench")
    need(atoms, command + " needs system atom or ensemble");
  if (command == "darkstates") need(cfg.cavity.detuning == 0.0, "darkstates needs detuning = 0");
  if (command == "scan" || command == "lici" || command == "propagate") {
    need(cfg.system == SystemKind::Diatomic, command + " needs system diatomic");
    need(cfg.molecule.has_value(), command + " needs a molecule section");
  }
  if (command == "scan") need(cfg.scan.has_value(), "scan needs a scan section");
  if (command == "propagate") need(cfg.propagation.has_value(), "propagate needs a propagation section");
  if (command == "lici" && cfg.lici && cfg.lici->r_window) {
    const auto [lo, hi] = *cfg.lici->r_window;
    need(lo >= cfg.molecule->r_min && hi <= cfg.molecule->r_max, "lici.r_window must lie inside the molecule domain");
  }
  if (command == "propagate") {
    const auto& g = cfg.propagation->grid;
    need(g.r_min >= cfg.molecule->r_min && g.r_max <= cfg.molecule->r_max,
         "propagation.grid must lie inside the molecule domain");
    need(g.n_points <= 4096, "propagation.grid.n_points must be <= 4096");
  }
  need(opt.threads >= 1, "--threads must be >= 1");
}

inline int dispatch(const std::string& command, const RunConfig& cfg, const RunOptions& opt) {
  if (command == "spectrum") return cmd_spectrum(cfg, opt);
  if (command == "darkstates") return cmd_darkstates(cfg, opt);
  if (command == "scan") return cmd_scan(cfg, opt);
  if (command == "lici") return cmd_lici(cfg, opt);
  if (command == "propagate") return cmd_propagate(cfg, opt);
  if (command == "bench") return cmd_bench(cfg, opt);
  throw Error(Errc::ConfigError, "unknown command " + command);
}

inline int exit_code_for(Errc c) {
  switch (c) {
    case Errc::NoCrossing: return NoCrossingFound;
    case Errc::StabilityViolation: return Unstable;
    case Errc::ConfigError: return ValidationFailure;
    default: return NumericFailure;
  }
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
  CLI::App app{"Polariton spectra, LICIs and wavepacket dynamics in a rotating cavity", "rotcav"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> sweep_args;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir in the config)");
  app.add_option("--sweep", sweep_args, "parameter sweep: <param> <start:stop:count>")->expected(2);
  app.add_option("--threads", threads, "worker threads for sweeps and scans");
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"spectrum", "analytic, dense and arrowhead spectra side by side"},
      {"darkstates", "dark-state census against the dense spectrum"},
      {"scan", "adiabatic surfaces over (r, theta, phi)"},
      {"lici", "locate light-induced conical intersections and their seams"},
      {"propagate", "wavepacket propagation at frozen angles"},
      {"bench", "arrowhead versus dense timing"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, msg;
    const int rc = app.exit(e, out, msg);
    std::cout << out.str();
    err << msg.str();
    return rc == 0 ? Ok : ValidationFailure;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  RunOptions opt;
  try {
    cfg = load_config(config_path);
    if (!sweep_args.empty()) opt.sweep = parse_sweep(sweep_args);
    opt.threads = threads;
    opt.out_dir = out_dir.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(out_dir);
    validate_for(command, cfg, opt);
  } catch (const Error& e) {
    err << "rotcav: " << e.what() << "\n";
    return ValidationFailure;
  }

  try {
    std::filesystem::create_directories(opt.out_dir);
    const int rc = dispatch(command, cfg, opt);
    if (rc != Ok) err << "rotcav: " << command << " check failed, see outputs in " << opt.out_dir.string() << "\n";
    return rc;
  } catch (const Error& e) {
    err << "rotcav: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "rotcav: " << e.what() << "\n";
    return NumericFailure;
  }
}

}  // namespace rotcav::cli
