#include "critlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <limits>
#include <thread>

#include "critlab/csv.hpp"

namespace critlab {

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::A: return "a";
    case SweepParameter::B: return "b";
    case SweepParameter::C: return "c";
    case SweepParameter::Mu0: return "mu0";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "a") return SweepParameter::A;
  if (name == "b") return SweepParameter::B;
  if (name == "c") return SweepParameter::C;
  if (name == "mu0") return SweepParameter::Mu0;
  throw ConfigError("sweep parameter must be one of a, b, c, mu0 (got '" + name + "')");
}

double DrivenConfig::step() const { return dt > 0.0 ? dt : default_step(integrator.mu0); }

std::size_t DrivenConfig::stride() const {
  if (record_stride > 0) return record_stride;
  return static_cast<std::size_t>(std::max(1.0, std::round(0.01 / step())));
}

AdaptationLaw DrivenConfig::make_law() const {
  return AdaptationLaw::affine(law, domain_x, domain_mu.value_or(default_gain_domain(integrator.mu0)));
}

TimeGrid DrivenConfig::grid() const { return TimeGrid::make(0.0, t_end, step()); }

double DrivenConfig::compatibility_defect() const {
  const double lhs = law.a * schedule.mean_level() + law.b * integrator.mu0;
  return std::abs(lhs - law.c) / std::max(std::abs(law.c), std::numeric_limits<double>::min());
}

Trajectory run_driven(const DrivenConfig& config, const SimulationOptions& options) {
  SimulationOptions o = options;
  o.record_stride = config.stride();
  return simulate_driven(config.integrator, config.make_law(), config.schedule, config.grid(), o);
}

DrivenConfig perturb(const DrivenConfig& base, SweepParameter param, double multiplier) {
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
    throw ConfigError("sweep multipliers must be finite and positive");
  }
  DrivenConfig c = base;
  switch (param) {
    case SweepParameter::A: c.law.a *= multiplier; break;
    case SweepParameter::B: c.law.b *= multiplier; break;
    case SweepParameter::C: c.law.c *= multiplier; break;
    case SweepParameter::Mu0: {
      const double offset = base.integrator.mu_init - base.integrator.mu0;
      c.integrator.mu0 *= multiplier;
      c.integrator.mu_init = c.integrator.mu0 + offset;
      break;
    }
  }
  return c;
}

namespace {

double parameter_value(const DrivenConfig& c, SweepParameter p) {
  switch (p) {
    case SweepParameter::A: return c.law.a;
    case SweepParameter::B: return c.law.b;
    case SweepParameter::C: return c.law.c;
    case SweepParameter::Mu0: return c.integrator.mu0;
  }
  return 0.0;
}

}  // namespace

std::vector<double> log_uniform_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_uniform_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  if (n % 2 == 1 && std::abs(lo * hi - 1.0) < 1e-12) g[n / 2] = 1.0;
  return g;
}

SweepRow run_sweep_point(const SweepSpec& spec, double multiplier) {
  SweepRow row;
  row.multiplier = multiplier;
  const DrivenConfig cfg = perturb(spec.base, spec.param, multiplier);
  row.value = parameter_value(cfg, spec.param);
  row.mu0 = cfg.integrator.mu0;

  const std::size_t reps = std::max<std::size_t>(1, spec.replicates);
  double sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    DrivenConfig rc = cfg;
    rc.integrator.mu_init +=
        (static_cast<double>(r) - 0.5 * static_cast<double>(reps - 1)) * spec.replicate_spacing;
    try {
      const Trajectory traj = run_driven(rc);
      const auto stats = periodic_regime_stats(traj, rc.integrator.mu0, rc.schedule);
      sum += stats.mean_gain_error;
      row.guard_drift = std::max(row.guard_drift, stats.guard.max_cycle_drift);
      if (!stats.guard.passed && !row.flagged) {
        row.flagged = true;
        row.flag = "drift-guard";
      }
    } catch (const Error& e) {
      row.flagged = true;
      row.flag = e.kind();
      row.mean_mu_minus_mu0 = std::numeric_limits<double>::quiet_NaN();
      return row;
    }
  }
  row.mean_mu_minus_mu0 = sum / static_cast<double>(reps);
  return row;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.base.integrator.check();
  spec.base.schedule.check();
  if (spec.base.compatibility_defect() > kCompatibilityTolerance) {
    throw CompatibilityError("nominal parameters violate a*mean(levels) + b*mu0 = c (relative defect " +
                             format_double(spec.base.compatibility_defect()) + ")");
  }
  std::vector<double> grid = spec.multipliers;
  for (double m : grid) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("sweep multipliers must be finite and positive");
  }
  if (std::find(grid.begin(), grid.end(), 1.0) == grid.end()) grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  SweepResult result;
  result.param = spec.param;
  result.nominal_mu0 = spec.base.integrator.mu0;
  result.rows.resize(grid.size());

  const std::size_t workers = std::clamp<std::size_t>(spec.threads, 1, grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) result.rows[i] = run_sweep_point(spec, grid[i]);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return result;
}

namespace {

// Multiplier where |mean| reaches the threshold walking outward from the
// identity row; nullopt when the walk runs off the grid first.
std::optional<double> crossing(const std::vector<const SweepRow*>& rows, std::size_t centre, int dir,
                               double threshold) {
  std::size_t i = centre;
  while (true) {
    if ((dir < 0 && i == 0) || (dir > 0 && i + 1 >= rows.size())) return std::nullopt;
    const std::size_t j = dir < 0 ? i - 1 : i + 1;
    const double a = std::abs(rows[i]->mean_mu_minus_mu0);
    const double b = std::abs(rows[j]->mean_mu_minus_mu0);
    if (b >= threshold) {
      const double w = b == a ? 1.0 : (threshold - a) / (b - a);
      return rows[i]->multiplier + w * (rows[j]->multiplier - rows[i]->multiplier);
    }
    i = j;
  }
}

}  // namespace

RobustnessEstimate robustness_factor(const SweepResult& result, double mu0, double threshold) {
  if (!(mu0 > 0.0)) throw ConfigError("robustness_factor: mu0 must be positive");
  std::vector<const SweepRow*> rows;
  for (const auto& r : result.rows) {
    if (!r.flagged && std::isfinite(r.mean_mu_minus_mu0)) rows.push_back(&r);
  }
  const auto it = std::find_if(rows.begin(), rows.end(), [](const SweepRow* r) { return r->multiplier == 1.0; });
  if (it == rows.end()) throw InsufficientRangeError("sweep has no clean identity row");
  const auto centre = static_cast<std::size_t>(it - rows.begin());
  if (std::abs(rows[centre]->mean_mu_minus_mu0) >= threshold) {
    throw InsufficientRangeError("nominal point already exceeds the gain tolerance");
  }

  RobustnessEstimate est;
  est.lower_multiplier = crossing(rows, centre, -1, threshold);
  est.upper_multiplier = crossing(rows, centre, +1, threshold);
  if (!est.lower_multiplier && !est.upper_multiplier) {
    throw InsufficientRangeError("sweep of " + to_string(result.param) + " does not reach |mean(mu-mu0)| = " +
                                 format_double(threshold) + " on either side");
  }
  double tol = std::numeric_limits<double>::infinity();
  if (est.lower_multiplier) tol = std::min(tol, 1.0 - *est.lower_multiplier);
  if (est.upper_multiplier) tol = std::min(tol, *est.upper_multiplier - 1.0);
  est.tolerable_perturbation = tol;
  est.factor = tol / (threshold / mu0);
  return est;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "param,multiplier,value,mean_mu_minus_mu0,flag\n";
  for (const auto& r : result.rows) {
    out << to_string(result.param) << ',' << format_double(r.multiplier) << ',' << format_double(r.value) << ','
        << format_double(r.mean_mu_minus_mu0) << ',' << (r.flagged ? r.flag : "ok") << '\n';
  }
}

}  // namespace critlab
