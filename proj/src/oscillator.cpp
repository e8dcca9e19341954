#include "critlab/oscillator.hpp"

#include <algorithm>
#include <cmath>

#include "critlab/csv.hpp"

namespace critlab {

void OscillatorParams::check() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("oscillator omega must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("oscillator lambda must be positive");
  for (double v : {mu0, x_init, xdot_init, mu_init}) {
    if (!std::isfinite(v)) throw ConfigError("oscillator parameters must be finite");
  }
}

namespace {

struct OscillatorField {
  static constexpr std::size_t kDimension = 3;
  const AdaptationLaw* law;
  double mu0;
  double lambda;
  double omega2;
  double omega;

  void operator()(double, std::span<const double> y, std::span<double> dy) const {
    const double x = y[0];
    const double v = y[1];
    const double mu = y[2];
    dy[0] = v;
    dy[1] = -(mu0 - mu) * v - lambda * v * v * v - omega2 * x;
    dy[2] = law->f(amplitude(x, v, omega)) - law->g(mu);
  }
};

}  // namespace

Trajectory simulate_oscillator(const OscillatorParams& params, const AdaptationLaw& law, const TimeGrid& grid,
                               std::size_t record_stride) {
  params.check();
  if (!law.is_frozen()) {
    const auto report = validate(law);
    if (!report.valid()) throw ConfigError("adaptation law " + report.summary());
  }
  const double init[3] = {params.x_init, params.xdot_init, params.mu_init};
  IntegrateOptions io{record_stride, {"x", "xdot", "mu"}};
  Trajectory traj = integrate(
      OscillatorField{&law, params.mu0, params.lambda, params.omega * params.omega, params.omega}, init, grid,
      EventRule{}, io);

  const auto xs = traj.column(0);
  const auto vs = traj.column(1);
  std::vector<double> r(traj.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = amplitude(xs[i], vs[i], params.omega);
  traj.add_column("r", std::move(r));
  return traj;
}

std::vector<AmplitudeSample> amplitude_samples(const Trajectory& traj) {
  const auto ts = traj.times();
  const auto rs = traj.column("r");
  std::vector<AmplitudeSample> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = AmplitudeSample{ts[i], rs[i]};
  return out;
}

std::vector<double> amplitude_envelope(const Trajectory& traj, double span) {
  if (!(span > 0.0)) throw ConfigError("amplitude_envelope: span must be positive");
  const auto ts = traj.times();
  const auto rs = traj.column("r");
  std::vector<double> env;
  if (ts.empty()) return env;
  const double t0 = ts.front();
  double window_end = t0 + span;
  double peak = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] > window_end) {
      env.push_back(peak);
      peak = 0.0;
      window_end += span;
      while (ts[i] > window_end) {  // sparse sampling: skip empty windows
        window_end += span;
      }
    }
    peak = std::max(peak, rs[i]);
  }
  if (std::abs(ts.back() - window_end) <= 1e-9 * span) env.push_back(peak);
  return env;
}

BalancePrediction harmonic_balance_prediction(const OscillatorParams& params, const AdaptationLaw& law,
                                              double r_max) {
  params.check();
  if (!(r_max > 0.0)) throw ConfigError("harmonic balance: r_max must be positive");
  if (law.is_frozen()) throw ConfigError("harmonic balance needs an adapting law");
  const auto report = validate(law);
  if (!report.valid()) throw ConfigError("adaptation law " + report.summary());

  const double k = 0.75 * params.lambda * params.omega * params.omega;
  // Strictly decreasing in s for valid laws.
  auto balance = [&](double s) { return law.f(std::sqrt(s)) - law.g(params.mu0 + k * s); };
  const double tol = 1e-10;

  const double h0 = balance(0.0);
  if (std::abs(h0) <= tol) return BalancePrediction{0.0, params.mu0, BalanceRegime::Critical};
  if (h0 < 0.0) {
    // No oscillation: the gain relaxes to g(mu) = f(0), below mu0.
    const double target = law.f(0.0);
    double lo = law.domain_mu().lo;
    double hi = params.mu0;
    if (law.g(lo) > target) {
      for (int i = 0; i < 200 && law.g(lo) > target; ++i) lo -= std::max(1.0, std::abs(lo));
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (law.g(mid) < target ? lo : hi) = mid;
    }
    return BalancePrediction{0.0, 0.5 * (lo + hi), BalanceRegime::Subcritical};
  }

  double lo = 0.0;
  double hi = r_max * r_max;
  if (balance(hi) > 0.0) {
    throw RangeError("harmonic balance: no equilibrium amplitude in (0, " + format_double(r_max) + "]");
  }
  for (int i = 0; i < 200 && hi - lo > tol * std::max(1.0, hi) * 1e-6; ++i) {
    const double mid = 0.5 * (lo + hi);
    (balance(mid) > 0.0 ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  return BalancePrediction{std::sqrt(s), params.mu0 + k * s, BalanceRegime::Oscillating};
}

}  // namespace critlab
