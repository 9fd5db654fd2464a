#include "kdvb/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "kdvb/config.hpp"
#include "kdvb/error.hpp"
#include "kdvb/harness.hpp"
#include "kdvb/io.hpp"
#include "kdvb/selftest.hpp"
#include "kdvb/spectra.hpp"
#include "kdvb/waves.hpp"

namespace kdvb {

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<double> r, alpha, eps, dt, delta0, T;
  std::optional<int> n, N, n_theta, record_every;
  std::optional<std::string> output_dir;

  void apply(RunConfig& cfg) const {
    if (r) cfg.r = *r;
    if (alpha) cfg.alpha = *alpha;
    if (eps) cfg.eps = *eps;
    if (dt) cfg.solver.dt = *dt;
    if (delta0) cfg.delta0 = *delta0;
    if (T) cfg.T = *T;
    if (n) cfg.n = *n;
    if (N) cfg.N = *N;
    if (n_theta) cfg.n_theta = *n_theta;
    if (record_every) cfg.solver.record_every = *record_every;
    if (output_dir) cfg.output_dir = *output_dir;
  }
};

ModelFunctions model_for(const WaveProfile& w, const RunConfig& cfg, bool from_flags) {
  if (!from_flags && std::isfinite(w.r) && std::isfinite(w.alpha)) return kdvbf_model(w.r, w.alpha);
  return kdvbf_model(cfg.r, cfg.alpha);
}

int cmd_solve(const std::string& config_path, const std::string& init_path,
              const std::string& out_path, std::ostream& out) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  const auto u0 = io::initial_data_from_json(io::read_file(init_path));
  if (cfg.L > 0 && std::abs(cfg.L - u0.L()) > 1e-12 * cfg.L) {
    throw ConfigError("config: 'L' = " + io::format_number(cfg.L) +
                      " disagrees with the initial data period " + io::format_number(u0.L()));
  }
  cfg.solver.validate();
  const auto trace = solve(u0, kdvbf_model(cfg.r, cfg.alpha), cfg.solver);
  const fs::path path = out_path.empty() ? cfg.output_dir / "trace.jsonl" : fs::path(out_path);
  io::save_trace(path, trace);
  out << "wrote " << trace.times.size() << " records to " << path.string() << "\n";
  if (trace.blew_up) {
    out << "blow-up: " << trace.message << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_find_wave(double r, double alpha, const std::vector<double>& eps, int n,
                  const std::string& dir, std::ostream& out) {
  if (!(r > 0)) throw ConfigError("--r must be positive");
  if (!(alpha > 0)) throw ConfigError("--alpha must be positive");
  if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("--n must be a power of two >= 8");
  if (eps.empty()) throw ConfigError("--eps needs at least one value");
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (!(eps[i] > eps[i - 1])) throw ConfigError("--eps values must increase");
  }
  if (!(eps[0] > 0 && eps[0] <= 0.01)) throw ConfigError("--eps: first value must lie in (0, 0.01]");
  const auto branch = continue_branch(r, alpha, eps, n);
  for (const auto& w : branch.profiles) {
    const auto path = fs::path(dir) / ("eps" + io::format_number(w.eps) + ".json");
    io::save_profile(path, w);
    out << "eps=" << w.eps << " c=" << w.c << " L=" << w.L() << " residual=" << w.residual
        << " -> " << path.string() << "\n";
  }
  if (branch.truncated) {
    out << "branch truncated: " << branch.message << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_spectrum(const std::string& profile_path, int N, int n_theta, const std::string& dir,
                 std::ostream& out) {
  if (N < 0) throw ConfigError("--N must be non-negative");
  if (n_theta < 2) throw ConfigError("--n-theta must be >= 2");
  const auto w = io::load_profile(profile_path);
  const auto model = model_for(w, RunConfig{}, false);
  const auto s = floquet_sweep(w, model, n_theta, N);
  const fs::path base = dir.empty() ? fs::path(profile_path).parent_path() : fs::path(dir);
  const auto stem = fs::path(profile_path).stem().string();
  io::write_atomic(base / (stem + ".spectrum.csv"), io::spectrum_to_csv(s));
  io::write_atomic(base / (stem + ".spectrum.json"), io::spectrum_summary_json(s));
  out << "max_real=" << s.max_real << " argmax_theta=" << s.argmax_theta
      << (s.unstable() ? " (unstable)" : "") << "\n";
  if (!s.failed.empty()) {
    out << s.failed.size() << " theta values failed\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_instability(const std::string& config_path, const std::string& profile_path,
                    const Overrides& ov, std::ostream& out) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  ov.apply(cfg);
  cfg.validate();

  const WaveProfile w = [&] {
    if (!profile_path.empty()) return io::load_profile(profile_path);
    std::vector<double> eps_list;
    for (double e = std::min(cfg.eps, 0.01); e < cfg.eps; e *= 2.0) eps_list.push_back(e);
    eps_list.push_back(cfg.eps);
    const auto branch = continue_branch(cfg.r, cfg.alpha, eps_list, cfg.n);
    if (branch.truncated) throw NoConvergenceError(NAN, "branch continuation: " + branch.message);
    return branch.profiles.back();
  }();
  const auto model = model_for(w, cfg, profile_path.empty());
  const auto eig = eigenpair_bloch(assemble_bloch(w, model, 0.0, cfg.N), 0);
  if (!(eig.lambda.real() > kInstabilityMargin)) {
    out << "top eigenvalue " << eig.lambda << " is not unstable\n";
    return kExitNumerical;
  }
  const double T = cfg.T > 0 ? cfg.T : std::log(1e3) / eig.lambda.real();
  ExperimentOptions opts;
  opts.fit_lo = cfg.fit_lo;
  opts.fit_hi = cfg.fit_hi;
  const auto rep = instability_experiment(w, model, eig, cfg.delta0, T, cfg.solver, opts);
  const auto path = cfg.output_dir / ("instability_eps" + io::format_number(w.eps) + ".json");
  io::write_atomic(path, io::report_to_json(rep));
  out << "lambda=" << eig.lambda << " fitted_rate=" << rep.fitted_rate
      << " verdict=" << to_string(rep.verdict) << " escaped_at=" << rep.escape.escaped_at << " -> "
      << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudospectral lab for KdV-Burgers equations with a source"};
  app.require_subcommand(1);

  std::string config_path, init_path, out_path;
  auto* solve_cmd = app.add_subcommand("solve", "Evolve initial data and write a trace");
  solve_cmd->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  solve_cmd->add_option("--init", init_path, "Initial data JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("-o,--output", out_path, "Trace file (JSON lines)");

  double r = 1.0, alpha = 1.0;
  std::vector<double> eps;
  int n = 256;
  std::string dir = ".";
  auto* wave_cmd = app.add_subcommand("find-wave", "Continue the wave branch in eps");
  wave_cmd->add_option("--r", r, "Source rate")->capture_default_str();
  wave_cmd->add_option("--alpha", alpha, "Flux coefficient")->capture_default_str();
  wave_cmd->add_option("--eps", eps, "Branch parameters")->required()->delimiter(',');
  wave_cmd->add_option("--n", n, "Collocation points")->capture_default_str();
  wave_cmd->add_option("-o,--output", dir, "Output directory")->capture_default_str();

  std::string profile_path, spec_dir;
  int N = 64, n_theta = 65;
  auto* spec_cmd = app.add_subcommand("spectrum", "Floquet sweep for a stored profile");
  spec_cmd->add_option("--profile", profile_path, "Profile JSON")->required()->check(CLI::ExistingFile);
  spec_cmd->add_option("--N", N, "Fourier truncation")->capture_default_str();
  spec_cmd->add_option("--n-theta", n_theta, "Number of Floquet exponents")->capture_default_str();
  spec_cmd->add_option("-o,--output", spec_dir, "Output directory (default: next to the profile)");

  Overrides ov;
  std::string inst_config, inst_profile;
  auto* inst_cmd = app.add_subcommand("instability", "Profile, eigenpair and perturbation experiment");
  inst_cmd->add_option("--config", inst_config, "Run configuration file")->check(CLI::ExistingFile);
  inst_cmd->add_option("--profile", inst_profile, "Profile JSON (computed when absent)")
      ->check(CLI::ExistingFile);
  inst_cmd->add_option("--r", ov.r);
  inst_cmd->add_option("--alpha", ov.alpha);
  inst_cmd->add_option("--eps", ov.eps);
  inst_cmd->add_option("--n", ov.n);
  inst_cmd->add_option("--N", ov.N);
  inst_cmd->add_option("--dt", ov.dt);
  inst_cmd->add_option("--delta0", ov.delta0);
  inst_cmd->add_option("--T", ov.T);
  inst_cmd->add_option("--record-every", ov.record_every);
  inst_cmd->add_option("-o,--output", ov.output_dir, "Output directory");

  auto* self_cmd = app.add_subcommand("selftest", "Run the built-in check suite");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(config_path, init_path, out_path, out);
    if (*wave_cmd) return cmd_find_wave(r, alpha, eps, n, dir, out);
    if (*spec_cmd) return cmd_spectrum(profile_path, N, n_theta, spec_dir, out);
    if (*inst_cmd) return cmd_instability(inst_config, inst_profile, ov, out);
    if (*self_cmd) {
      const auto results = run_selftest(out);
      for (const auto& c : results) {
        if (!c.passed) return kExitNumerical;
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace kdvb
