#include "critlab/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "critlab/averaging.hpp"
#include "critlab/config.hpp"
#include "critlab/csv.hpp"
#include "critlab/errors.hpp"
#include "critlab/integrator.hpp"
#include "critlab/oscillator.hpp"
#include "critlab/sweep.hpp"

namespace critlab::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

// out.csv -> out.<suffix>.csv
fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + "." + suffix + ".csv");
  return p;
}

std::string quoted(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += (c == '\n') ? ' ' : c;
  }
  return r + "\"";
}

int report_error(std::ostream& err, int code, const char* kind, const std::string& message) {
  err << "critlab: error code=" << code << " kind=" << kind << " message=" << quoted(message) << std::endl;
  return code;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const CompatibilityError& e) {
    return report_error(err, kPrecondition, e.kind(), e.what());
  } catch (const DivergenceError& e) {
    return report_error(err, kDivergence, e.kind(), e.what());
  } catch (const DomainExitError& e) {
    return report_error(err, kDivergence, e.kind(), e.what());
  } catch (const Error& e) {
    return report_error(err, kConfigError, e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(err, kConfigError, "io", e.what());
  }
}

WarningSink warnings_to(std::ostream& err) {
  return [&err](const std::string& msg) { err << "critlab: warning " << quoted(msg) << std::endl; };
}

int simulate_integrator(const fs::path& config_path, const fs::path& out_path, std::ostream& out,
                        std::ostream& err) {
  const RunConfig cfg = RunConfig::load(config_path);
  const IntegratorRun run = build_integrator_run(cfg);
  const AdaptationLaw law = build_law(cfg, run.params.mu0, LawContext::Integrator);
  if (!law.is_frozen()) {
    const ValidityReport report = validate(law);
    if (!report.valid()) throw ConfigError("adaptation law " + report.summary());
    if (report.f_constant) err << "critlab: warning " << quoted(report.summary()) << std::endl;
  }
  SimulationOptions opts{run.record_stride, warnings_to(err)};

  if (run.schedule) {
    const Trajectory traj = simulate_driven(run.params, law, *run.schedule, run.grid, opts);
    {
      auto f = open_output(out_path);
      write_trajectory_csv(f, traj);
      auto ev = open_output(sibling(out_path, "events"));
      write_events_csv(ev, traj);
    }
    out << "mode=driven samples=" << traj.size() << " saccades=" << traj.events().size() << "\n";
    const auto stats = periodic_regime_stats(traj, run.params.mu0, *run.schedule);
    out << "periodic_window=" << format_double(stats.window.t0) << ".." << format_double(stats.window.t1)
        << " mean_mu_minus_mu0=" << format_double(stats.mean_gain_error)
        << " max_saccade_drift=" << format_double(stats.max_saccade_drift)
        << " drift_guard=" << (stats.guard.passed ? "pass" : "fail") << "\n";
    return kOk;
  }

  const Trajectory traj = simulate_autonomous(run.params, law, run.grid, opts);
  {
    auto f = open_output(out_path);
    write_trajectory_csv(f, traj);
  }
  out << "mode=autonomous samples=" << traj.size() << "\n";
  if (!law.is_frozen()) {
    const EnergyReport energy = check_energy_decrease(traj, law, run.params.mu0, run.energy_kappa);
    auto f = open_output(sibling(out_path, "energy"));
    write_energy_csv(f, energy);
    out << "energy_check=" << (energy.passed ? "pass" : "fail")
        << " max_increment=" << format_double(energy.max_increment) << " violations=" << energy.violations
        << "\n";
  }
  return kOk;
}

int simulate_oscillator_cmd(const fs::path& config_path, const fs::path& out_path, std::ostream& out,
                            std::ostream& err) {
  const RunConfig cfg = RunConfig::load(config_path);
  const OscillatorRun run = build_oscillator_run(cfg);
  const AdaptationLaw law = run.frozen ? AdaptationLaw::frozen() : build_law(cfg, run.params.mu0, LawContext::Oscillator);
  if (!law.is_frozen()) {
    const ValidityReport report = validate(law);
    if (!report.valid()) throw ConfigError("adaptation law " + report.summary());
    if (report.f_constant) err << "critlab: warning " << quoted(report.summary()) << std::endl;
  }
  const Trajectory traj = simulate_oscillator(run.params, law, run.grid, run.record_stride);
  {
    auto f = open_output(out_path);
    write_trajectory_csv(f, traj);
  }
  const TimeWindow w = periodic_regime_window(traj);
  const double r_mean = time_average(traj, w, [](double v) { return v; }, "r");
  const double mu_mean = time_average(traj, w, [](double v) { return v; }, "mu");
  out << "measured r=" << format_double(r_mean) << " mu=" << format_double(mu_mean) << " window="
      << format_double(w.t0) << ".." << format_double(w.t1) << "\n";
  if (!law.is_frozen()) {
    const BalancePrediction p = harmonic_balance_prediction(run.params, law, run.r_max);
    const char* regime = p.regime == BalanceRegime::Oscillating ? "oscillating"
                         : p.regime == BalanceRegime::Critical  ? "critical"
                                                                : "subcritical";
    out << "predicted r=" << format_double(p.r_infinity) << " mu=" << format_double(p.mu_infinity)
        << " regime=" << regime << "\n";
  }
  return kOk;
}

std::size_t resolve_threads(int flag, std::size_t from_spec) {
  if (flag > 0) return static_cast<std::size_t>(flag);
  if (const char* env = std::getenv("CRITLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw ConfigError("CRITLAB_THREADS must be a positive integer");
  }
  return std::max<std::size_t>(1, from_spec);
}

int sweep_cmd(const fs::path& spec_path, const fs::path& out_path, int threads, std::ostream& out,
              std::ostream& err) {
  const RunConfig spec_cfg = RunConfig::load(spec_path);
  SweepSpec spec = build_sweep_spec(spec_cfg);
  spec.threads = resolve_threads(threads, spec.threads);
  const SweepResult result = run_sweep(spec);
  {
    auto f = open_output(out_path);
    write_sweep_csv(f, result);
  }
  std::size_t flagged = 0;
  for (const auto& r : result.rows) flagged += r.flagged ? 1 : 0;
  out << "param=" << to_string(result.param) << " points=" << result.rows.size() << " flagged=" << flagged << "\n";
  try {
    const RobustnessEstimate est = robustness_factor(result, result.nominal_mu0);
    out << "robustness_factor=" << format_double(est.factor)
        << " tolerable_perturbation=" << format_double(est.tolerable_perturbation) << "\n";
  } catch (const InsufficientRangeError& e) {
    err << "critlab: warning " << quoted(std::string("robustness factor unavailable: ") + e.what()) << std::endl;
    out << "robustness_factor=unavailable\n";
  }
  return kOk;
}

int check_compat(const fs::path& config_path, std::ostream& out) {
  const RunConfig cfg = RunConfig::load(config_path);
  const IntegratorRun run = build_integrator_run(cfg);
  if (!run.schedule) throw ConfigError("check-compat needs a saccade schedule (saccade.levels)");
  const AdaptationLaw law = build_law(cfg, run.params.mu0, LawContext::Integrator);
  const ValidityReport report = validate(law);
  if (!report.valid()) throw ConfigError("adaptation law " + report.summary());
  const FixedPoint fp = fixed_point(law, run.params.mu0);

  double residual = 0.0;
  double threshold = 0.0;
  const char* method = nullptr;
  if (law.affine_params()) {
    // Equal dwell at each level: P(x) is a uniform mixture of point masses.
    double mean_f = 0.0;
    for (double l : run.schedule->levels) mean_f += law.f(l);
    mean_f /= static_cast<double>(run.schedule->levels.size());
    residual = mean_f - law.f(fp.x_star);
    threshold = cfg.get_double("compat.threshold", 1e-9);
    method = "analytic";
  } else {
    // Probe: perfectly tuned, frozen gain, two full schedule cycles.
    IntegratorParams probe = run.params;
    probe.mu_init = probe.mu0;
    probe.x_init = run.schedule->levels.front();
    SaccadeSchedule sched = *run.schedule;
    sched.t_first = 0.0;
    const double horizon = 2.0 * sched.cycle();
    const TimeGrid grid = TimeGrid::make(0.0, horizon, std::min(run.grid.dt, sched.period / 100.0));
    const Trajectory traj = simulate_driven(probe, AdaptationLaw::frozen(law.domain_x(), law.domain_mu()), sched, grid);
    const auto hist = occupancy(traj, TimeWindow{0.0, horizon}, cfg.get_count("compat.bins", kDefaultBins));
    residual = compatibility_residual(hist, law, run.params.mu0);
    threshold = cfg.get_double("compat.threshold", 1e-3);
    method = "empirical";
  }
  const bool ok = std::abs(residual) <= threshold;
  out << "method=" << method << " residual=" << format_double(residual) << " threshold=" << format_double(threshold)
      << " x_star=" << format_double(fp.x_star) << " compatible=" << (ok ? "yes" : "no") << "\n";
  return ok ? kOk : kIncompatible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-tuning bifurcation simulations", "critlab"};
  app.require_subcommand(1);

  std::string config;
  std::string output;
  int threads = 0;

  auto* integ = app.add_subcommand("simulate-integrator", "Neural integrator run (driven or autonomous)");
  integ->add_option("--config", config, "Config file")->required();
  integ->add_option("--out", output, "Trajectory CSV")->required();

  auto* osc = app.add_subcommand("simulate-oscillator", "Self-tuned nonlinear oscillator run");
  osc->add_option("--config", config, "Config file")->required();
  osc->add_option("--out", output, "Trajectory CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "Parameter robustness sweep");
  sweep->add_option("--config", config, "Sweep spec file")->required();
  sweep->add_option("--out", output, "Result CSV")->required();
  sweep->add_option("--threads", threads, "Worker threads (fallback: CRITLAB_THREADS)")->check(CLI::PositiveNumber);

  auto* compat = app.add_subcommand("check-compat", "Compatibility residual of a driven config");
  compat->add_option("--config", config, "Config file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, kUsage, "usage", e.what());
  }

  if (integ->parsed()) return guarded(err, [&] { return simulate_integrator(config, output, out, err); });
  if (osc->parsed()) return guarded(err, [&] { return simulate_oscillator_cmd(config, output, out, err); });
  if (sweep->parsed()) return guarded(err, [&] { return sweep_cmd(config, output, threads, out, err); });
  return guarded(err, [&] { return check_compat(config, out); });
}

}  // namespace critlab::cli
