#include "critlab/integrator.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <ostream>

#include "critlab/csv.hpp"

namespace critlab {

void IntegratorParams::check() const {
  if (!(mu0 > 0.0) || !std::isfinite(mu0)) throw ConfigError("mu0 must be positive");
  if (!(x_init > 0.0) || !std::isfinite(x_init)) throw ConfigError("x_init must be positive");
  if (!std::isfinite(mu_init)) throw ConfigError("mu_init must be finite");
}

void SaccadeSchedule::check() const {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("saccade period must be positive");
  if (levels.empty()) throw ConfigError("saccade schedule needs at least one level");
  for (double l : levels) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("saccade levels must be positive");
  }
  if (!std::isfinite(t_first)) throw ConfigError("saccade t_first must be finite");
}

double SaccadeSchedule::mean_level() const {
  double s = 0.0;
  for (double l : levels) s += l;
  return s / static_cast<double>(levels.size());
}

std::vector<double> SaccadeSchedule::times(const TimeGrid& grid) const {
  check();
  const std::size_t n = grid.steps();
  const double t_last = grid.time_at(n);
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double t = t_first + static_cast<double>(i) * period;
    if (t > t_last + 0.5 * grid.dt) break;
    if (t >= grid.t_start - 0.5 * grid.dt) out.push_back(t);
  }
  return out;
}

double default_step(double mu0) { return std::min(1e-3, 0.01 / mu0); }

namespace {

void require_usable_law(const AdaptationLaw& law) {
  if (law.is_frozen()) return;
  const auto report = validate(law);
  if (!report.valid()) throw ConfigError("adaptation law " + report.summary());
}

struct IntegratorField {
  static constexpr std::size_t kDimension = 2;
  const AdaptationLaw* law;
  double mu0;

  void operator()(double, std::span<const double> y, std::span<double> dy) const {
    dy[0] = (y[1] - mu0) * y[0];
    dy[1] = law->f(y[0]) - law->g(y[1]);
  }
};

class DomainGuard {
 public:
  DomainGuard(const AdaptationLaw& law, const WarningSink& sink) : law_(&law), sink_(&sink) {}

  void operator()(double t, std::span<const double> y) {
    if (!law_->domain_x().contains(y[0])) {
      throw DomainExitError("x=" + format_double(y[0]) + " left " + law_->domain_x().to_string() +
                                " at t=" + format_double(t),
                            t);
    }
    if (!warned_ && !law_->domain_mu().contains(y[1])) {
      warned_ = true;
      if (*sink_) {
        (*sink_)("mu=" + format_double(y[1]) + " left " + law_->domain_mu().to_string() + " at t=" +
                 format_double(t));
      }
    }
  }

 private:
  const AdaptationLaw* law_;
  const WarningSink* sink_;
  bool warned_ = false;
};

void check_initial(const IntegratorParams& params, const AdaptationLaw& law) {
  params.check();
  if (!law.domain_x().contains(params.x_init)) {
    throw ConfigError("x_init=" + format_double(params.x_init) + " outside " + law.domain_x().to_string());
  }
}

}  // namespace

Trajectory simulate_autonomous(const IntegratorParams& params, const AdaptationLaw& law, const TimeGrid& grid,
                               const SimulationOptions& options) {
  check_initial(params, law);
  require_usable_law(law);
  const double init[2] = {params.x_init, params.mu_init};
  IntegrateOptions io{options.record_stride, {"x", "mu"}};
  return integrate(IntegratorField{&law, params.mu0}, init, grid, EventRule{}, io,
                   DomainGuard(law, options.on_warning));
}

Trajectory simulate_driven(const IntegratorParams& params, const AdaptationLaw& law,
                           const SaccadeSchedule& schedule, const TimeGrid& grid,
                           const SimulationOptions& options) {
  check_initial(params, law);
  require_usable_law(law);
  schedule.check();
  for (double l : schedule.levels) {
    if (!law.domain_x().contains(l)) {
      throw ConfigError("saccade level " + format_double(l) + " outside " + law.domain_x().to_string());
    }
  }

  EventRule rule;
  rule.times = schedule.times(grid);
  rule.label = "saccade";
  rule.jump = [&schedule](std::size_t i, double, std::span<const double> pre) {
    return State{schedule.level(i), pre[1]};
  };
  const double init[2] = {params.x_init, params.mu_init};
  IntegrateOptions io{options.record_stride, {"x", "mu"}};
  return integrate(IntegratorField{&law, params.mu0}, init, grid, rule, io,
                   DomainGuard(law, options.on_warning));
}

EnergyFunction::EnergyFunction(const AdaptationLaw& law, double mu0)
    : law_(&law), mu0_(mu0), x_star_(fixed_point(law, mu0).x_star), g0_(law.g(mu0)) {}

double EnergyFunction::potential(double q) const {
  if (q == 0.0) return 0.0;
  if (auto p = law_->affine_params()) {
    // -int_0^q eps (c - b mu0 - a x* e^s) ds
    return p->eps * (p->a * x_star_ * std::expm1(q) - (p->c - p->b * mu0_) * q);
  }
  auto force = [this](double s) { return law_->f(std::exp(s) * x_star_) - g0_; };
  // Fixed 61-point rule on pieces of width <= 1/4: the integrand is smooth,
  // and an adaptive tolerance stalls when q (and the integral) is tiny.
  using boost::math::quadrature::gauss_kronrod;
  const double lo = std::min(0.0, q);
  const double hi = std::max(0.0, q);
  const auto pieces = static_cast<std::size_t>(std::ceil((hi - lo) / 0.25));
  const double h = (hi - lo) / static_cast<double>(pieces);
  double integral = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) {
    const double a = lo + h * static_cast<double>(i);
    const double b = i + 1 == pieces ? hi : a + h;
    integral += gauss_kronrod<double, 61>::integrate(force, a, b, 0);
  }
  return q > 0.0 ? -integral : integral;
}

EnergyState EnergyFunction::operator()(double x, double mu) const {
  if (!(x > 0.0)) throw RangeError("energy: x must be positive, got " + format_double(x));
  EnergyState s;
  s.q = std::log(x / x_star_);
  s.p = mu - mu0_;
  s.V = 0.5 * s.p * s.p + potential(s.q);
  return s;
}

EnergyState energy(double x, double mu, const AdaptationLaw& law, double mu0) {
  if (!(x > 0.0)) throw RangeError("energy: x must be positive, got " + format_double(x));
  return EnergyFunction(law, mu0)(x, mu);
}

EnergyReport check_energy_decrease(const Trajectory& traj, const AdaptationLaw& law, double mu0, double kappa) {
  if (!traj.events().empty()) {
    throw ProtocolError("energy certificate applies to autonomous runs only; trajectory has " +
                        std::to_string(traj.events().size()) + " events");
  }
  if (traj.empty()) throw RangeError("check_energy_decrease: empty trajectory");
  const EnergyFunction V(law, mu0);
  const auto xs = traj.column("x");
  const auto mus = traj.column("mu");

  EnergyReport report;
  report.t.assign(traj.times().begin(), traj.times().end());
  report.values.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) report.values.push_back(V(xs[i], mus[i]));

  report.max_increment = -std::numeric_limits<double>::infinity();
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double dt = report.t[i + 1] - report.t[i];
    const double inc = report.values[i + 1].V - report.values[i].V;
    const double excess = inc - kappa * dt * dt;
    report.max_increment = std::max(report.max_increment, inc);
    if (excess > report.max_excess) {
      report.max_excess = excess;
      report.at_time = report.t[i + 1];
    }
    if (excess > 0.0) ++report.violations;
  }
  if (traj.size() < 2) {
    report.max_increment = 0.0;
    report.max_excess = 0.0;
  }
  report.passed = report.violations == 0;
  return report;
}

void write_energy_csv(std::ostream& out, const EnergyReport& report) {
  out << "t,q,p,V\n";
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    const auto& e = report.values[i];
    out << format_double(report.t[i]) << ',' << format_double(e.q) << ',' << format_double(e.p) << ','
        << format_double(e.V) << '\n';
  }
}

std::size_t count_rest_points(const AdaptationLaw& law, double mu0, std::size_t n) {
  if (n < 2) throw ConfigError("count_rest_points: need at least a 2x2 grid");
  const Interval& dx = law.domain_x();
  const Interval& dm = law.domain_mu();
  const double x_lo = dx.lo_open ? dx.lo + (dx.hi - dx.lo) / static_cast<double>(4 * n) : dx.lo;
  std::vector<double> xs(n + 1), mus(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    xs[i] = x_lo + (dx.hi - x_lo) * static_cast<double>(i) / static_cast<double>(n);
    mus[i] = dm.lo + (dm.hi - dm.lo) * static_cast<double>(i) / static_cast<double>(n);
  }
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  auto straddles = [](int a, int b, int c, int d) {
    const int lo = std::min({a, b, c, d});
    const int hi = std::max({a, b, c, d});
    return lo <= 0 && hi >= 0 && !(lo == hi && lo != 0);
  };

  std::vector<char> hit(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      int s1[4], s2[4];
      int k = 0;
      for (std::size_t di = 0; di < 2; ++di) {
        for (std::size_t dj = 0; dj < 2; ++dj, ++k) {
          const double x = xs[i + di];
          const double mu = mus[j + dj];
          s1[k] = sign((mu - mu0) * x);
          s2[k] = sign(law.f(x) - law.g(mu));
        }
      }
      if (straddles(s1[0], s1[1], s1[2], s1[3]) && straddles(s2[0], s2[1], s2[2], s2[3])) hit[i * n + j] = 1;
    }
  }

  // Connected components, 8-neighbourhood.
  std::size_t clusters = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < hit.size(); ++start) {
    if (hit[start] != 1) continue;
    ++clusters;
    stack.push_back(start);
    hit[start] = 2;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      const auto ci = static_cast<long>(c / n);
      const auto cj = static_cast<long>(c % n);
      for (long di = -1; di <= 1; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
          const long ni = ci + di;
          const long nj = cj + dj;
          if (ni < 0 || nj < 0 || ni >= static_cast<long>(n) || nj >= static_cast<long>(n)) continue;
          const auto idx = static_cast<std::size_t>(ni) * n + static_cast<std::size_t>(nj);
          if (hit[idx] == 1) {
            hit[idx] = 2;
            stack.push_back(idx);
          }
        }
      }
    }
  }
  return clusters;
}

}  // namespace critlab
