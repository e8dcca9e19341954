#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "critlab/averaging.hpp"

using namespace critlab;

namespace {

const AffineLawParams kNominal{1.0, 0.01, 42.0, 0.01};

AdaptationLaw nominal_law(double c = 42.0) {
  AffineLawParams p = kNominal;
  p.c = c;
  return AdaptationLaw::affine(p, kDefaultRateDomain, default_gain_domain(200.0));
}

OccupancyHistogram point_masses(std::vector<std::pair<double, double>> masses) {
  // Narrow bins around each mass, empty bins between.
  OccupancyHistogram h;
  for (const auto& [x, w] : masses) {
    if (!h.edges.empty()) h.weights.push_back(0.0);
    h.edges.push_back(x - 0.5);
    h.edges.push_back(x + 0.5);
    h.weights.push_back(w);
  }
  return h;
}

// x(t) = 60 e^{0.1 t} on [0, 1), reset to 60 each second.
Trajectory drift_run(double dt = 1e-3) {
  return simulate_driven(IntegratorParams{200.0, 60.0, 200.1}, AdaptationLaw::frozen(), SaccadeSchedule{1.0, {60.0}, 0.0},
                         TimeGrid::make(0.0, 3.0, dt));
}

}  // namespace

TEST_SUITE("averaging") {

TEST_CASE("constant trajectory puts all mass in one bin containing the value") {
  const auto traj = simulate_autonomous(IntegratorParams{200.0, 40.0, 200.0}, nominal_law(),
                                        TimeGrid::make(0.0, 2.0, 1e-3), SimulationOptions{10, {}});
  const auto h = occupancy(traj, TimeWindow{0.0, 2.0});
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.weights[i] > 0.0) {
      ++nonzero;
      CHECK(h.edges[i] <= 40.0);
      CHECK(h.edges[i + 1] >= 40.0);
      CHECK(h.weights[i] == doctest::Approx(1.0));
    }
  }
  CHECK(nonzero == 1);
  CHECK(compatibility_residual(h, nominal_law(), 200.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("tuned alternation splits the mass between the two levels") {
  const auto traj = simulate_driven(IntegratorParams{200.0, 20.0, 200.0}, AdaptationLaw::frozen(), SaccadeSchedule{},
                                    TimeGrid::make(0.0, 10.0, 1e-3), SimulationOptions{10, {}});
  const auto h = occupancy(traj, TimeWindow{0.0, 10.0});
  CHECK(h.weights.front() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h.weights.back() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::accumulate(h.weights.begin() + 1, h.weights.end() - 1, 0.0) == 0.0);
  // Residual against the compatible law vanishes up to the bin offset, which cancels by symmetry.
  CHECK(std::abs(compatibility_residual(h, nominal_law(), 200.0)) <= 1e-12);
}

TEST_CASE("drift run matches the change-of-variables occupancy") {
  // Time in [lo, hi] over one period: ln(hi / lo) / 0.1.
  const auto traj = drift_run();
  const double top = 60.0 * std::exp(0.1);
  const std::size_t n = 32;
  const auto h = occupancy(traj, TimeWindow{1.0, 2.0}, n, 60.0, top);
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = std::log(h.edges[i + 1] / h.edges[i]) / 0.1;
    CAPTURE(i);
    CHECK(h.weights[i] == doctest::Approx(exact).epsilon(1e-5));
  }
}

TEST_CASE("histogram functional agrees with direct time averages within 1%") {
  const auto traj = drift_run();
  const TimeWindow w{0.0, 3.0};
  const auto h = occupancy(traj, w, kDefaultBins);
  const auto lin = [](double x) { return x; };
  const auto sq = [](double x) { return x * x; };
  const auto inv = [](double x) { return 1.0 / x; };
  // Closed forms over one period of 60 e^{0.1 t}.
  const double mean_x = 600.0 * (std::exp(0.1) - 1.0);
  const double mean_x2 = 3600.0 * (std::exp(0.2) - 1.0) / 0.2;
  const double mean_inv = (1.0 - std::exp(-0.1)) / 6.0;
  CHECK(h.expectation(lin) == doctest::Approx(mean_x).epsilon(0.01));
  CHECK(h.expectation(sq) == doctest::Approx(mean_x2).epsilon(0.01));
  CHECK(h.expectation(inv) == doctest::Approx(mean_inv).epsilon(0.01));
  CHECK(time_average(traj, w, lin) == doctest::Approx(mean_x).epsilon(1e-6));
  CHECK(time_average(traj, w, sq) == doctest::Approx(mean_x2).epsilon(1e-6));
  CHECK(h.expectation(sq) == doctest::Approx(time_average(traj, w, sq)).epsilon(0.01));
}

TEST_CASE("averaged rate and compatibility residual arithmetic") {
  const auto half = point_masses({{20.0, 0.5}, {60.0, 0.5}});
  CHECK(averaged_rate(half, nominal_law(), 200.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(averaged_rate(half, nominal_law(43.0), 200.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(compatibility_residual(half, nominal_law(43.0), 200.0) == doctest::Approx(0.01).epsilon(1e-10));

  const auto at_star = point_masses({{40.0, 1.0}});
  CHECK(averaged_rate(at_star, nominal_law(), 200.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(compatibility_residual(at_star, nominal_law(), 200.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const auto at_60 = point_masses({{60.0, 1.0}});
  CHECK(compatibility_residual(at_60, nominal_law(), 200.0) == doctest::Approx(-0.2).epsilon(1e-10));
}

TEST_CASE("time average honours jumps") {
  const auto traj = simulate_driven(IntegratorParams{200.0, 1.0, 200.0}, AdaptationLaw::frozen(),
                                    SaccadeSchedule{0.5, {1.0, 3.0}, 0.0}, TimeGrid::make(0.0, 1.0, 0.1),
                                    SimulationOptions{5, {}});
  CHECK(time_average(traj, TimeWindow{0.0, 1.0}, [](double x) { return x; }) == doctest::Approx(2.0));
  CHECK(time_average(traj, TimeWindow{0.0, 0.5}, [](double x) { return x; }) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)time_average(traj, TimeWindow{0.0, 2.0}, [](double x) { return x; }), RangeError);
}

TEST_CASE("periodic regime of a tuned driven run is stationary") {
  const SaccadeSchedule sched{};
  const auto traj = simulate_driven(IntegratorParams{200.0, 20.0, 200.0}, nominal_law(), sched,
                                    TimeGrid::make(0.0, 400.0, default_step(200.0)), SimulationOptions{200, {}});
  const TimeWindow w = periodic_regime_window(traj);
  CHECK(w.t0 == doctest::Approx(300.0));
  CHECK(w.t1 == doctest::Approx(400.0));
  const double mid = 0.5 * (w.t0 + w.t1);
  const auto h1 = occupancy(traj, TimeWindow{w.t0, mid}, 128, 15.0, 70.0);
  const auto h2 = occupancy(traj, TimeWindow{mid, w.t1}, 128, 15.0, 70.0);
  CHECK(total_variation(h1, h2) <= 0.01);

  const auto stats = periodic_regime_stats(traj, 200.0, sched);
  CHECK(std::abs(stats.mean_gain_error) <= 0.1);
  CHECK(stats.max_saccade_drift <= std::exp(0.1) - 1.0);
  CHECK(stats.saccade_pairs >= 99);
  CHECK(stats.guard.passed);
  CHECK(stats.guard.threshold == doctest::Approx(0.2));
}

TEST_CASE("drift guard flags a ramp") {
  // mu ramps linearly: per-cycle means differ by slope * cycle.
  Trajectory t({"x", "mu"});
  for (int i = 0; i <= 100; ++i) {
    const double s[2] = {1.0, 0.5 * i};
    t.append(static_cast<double>(i), s);
  }
  const auto g = drift_guard(t, TimeWindow{0.0, 100.0}, 10.0, 1.0);
  CHECK_FALSE(g.passed);
  CHECK(g.max_cycle_drift == doctest::Approx(5.0));
  CHECK(drift_guard(t, TimeWindow{0.0, 100.0}, 10.0, 6.0).passed);
}

TEST_CASE("histogram csv and total variation") {
  const auto a = point_masses({{1.0, 0.25}, {3.0, 0.75}});
  const auto b = point_masses({{1.0, 0.75}, {3.0, 0.25}});
  CHECK(total_variation(a, b) == doctest::Approx(0.5));
  CHECK(total_variation(a, a) == 0.0);
  std::ostringstream s;
  write_histogram_csv(s, a);
  CHECK(s.str().rfind("bin_lo,bin_hi,weight\n", 0) == 0);
}

}
