#include <doctest.h>

#include <cmath>
#include <sstream>

#include "critlab/dynamics.hpp"

using namespace critlab;

namespace {

VectorField linear(double lambda) {
  return [lambda](double, std::span<const double> y, std::span<double> dy) { dy[0] = lambda * y[0]; };
}

double final_value(double lambda, double dt, double t_end = 1.0) {
  const double init[1] = {1.0};
  const auto traj = integrate(linear(lambda), init, TimeGrid::make(0.0, t_end, dt), EventRule{});
  return traj.value(traj.size() - 1, 0);
}

double max_rel_error(double lambda, double dt) {
  const double init[1] = {1.0};
  const auto traj = integrate(linear(lambda), init, TimeGrid::make(0.0, 1.0, dt), EventRule{});
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double exact = std::exp(lambda * traj.time(i));
    worst = std::max(worst, std::abs(traj.value(i, 0) - exact) / exact);
  }
  return worst;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("zero field keeps the initial state") {
  const double init[1] = {5.0};
  const auto traj = integrate(linear(0.0), init, TimeGrid::make(0.0, 2.0, 0.1), EventRule{});
  REQUIRE(traj.size() == 21);
  for (double v : traj.column(0)) CHECK(v == 5.0);
}

TEST_CASE("exponential decay matches the closed form") {
  const double x1 = final_value(-1.0, 1e-3);
  CHECK(std::abs(x1 - std::exp(-1.0)) / std::exp(-1.0) <= 1e-8);
}

TEST_CASE("exponential growth and decay for |lambda| <= 10 at dt = 1e-4") {
  for (double lambda : {-10.0, -3.0, -0.5, 0.5, 3.0, 10.0}) {
    CAPTURE(lambda);
    CHECK(max_rel_error(lambda, 1e-4) <= 1e-8);
  }
}

TEST_CASE("halving the step shrinks the error by about 16") {
  for (double lambda : {-10.0, 5.0}) {
    CAPTURE(lambda);
    const double e1 = max_rel_error(lambda, 0.02);
    const double e2 = max_rel_error(lambda, 0.01);
    CHECK(e1 / e2 >= 16.0 * 0.9);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 3.8);
    CHECK(order <= 4.2);
  }
}

TEST_CASE("a pure jump switches the state at the event time") {
  EventRule rule{{0.5}, "kick", [](std::size_t, double, std::span<const double>) { return State{3.0}; }};
  const double init[1] = {1.0};
  const auto traj = integrate(linear(0.0), init, TimeGrid::make(0.0, 1.0, 0.01), rule);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    CAPTURE(t);
    CHECK(traj.value(i, 0) == (t < 0.5 - 1e-12 ? 1.0 : 3.0));
  }
  REQUIRE(traj.events().size() == 1);
  const Event& e = traj.events().front();
  CHECK(e.label == "kick");
  CHECK(e.pre == State{1.0});
  CHECK(e.post == State{3.0});
  CHECK(traj.left_limit(50) == State{1.0});
}

TEST_CASE("event jump is applied atomically after the flow reaches it") {
  // x' = x, doubled at t = 0.25: the flow afterwards starts from the doubled state.
  EventRule rule{{0.25}, "double", [](std::size_t, double, std::span<const double> pre) {
                   return State{2.0 * pre[0]};
                 }};
  const double init[1] = {1.0};
  const auto traj = integrate(linear(1.0), init, TimeGrid::make(0.0, 1.0, 1e-3), rule);
  const Event& e = traj.events().front();
  CHECK(e.post[0] - e.pre[0] == e.pre[0]);
  CHECK(e.pre[0] == doctest::Approx(std::exp(0.25)).epsilon(1e-10));
  CHECK(traj.value(traj.size() - 1, 0) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-10));
}

TEST_CASE("identical inputs give bit-identical trajectories") {
  EventRule rule{{0.3, 0.6}, "e", [](std::size_t i, double, std::span<const double> pre) {
                   return State{pre[0] + static_cast<double>(i + 1)};
                 }};
  const double init[1] = {0.7};
  const auto a = integrate(linear(-2.3), init, TimeGrid::make(0.0, 1.0, 1e-3), rule);
  const auto b = integrate(linear(-2.3), init, TimeGrid::make(0.0, 1.0, 1e-3), rule);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.value(i, 0) == b.value(i, 0));
}

TEST_CASE("record stride keeps events and the final sample") {
  EventRule rule{{0.123}, "e", [](std::size_t, double, std::span<const double> pre) { return State{pre[0]}; }};
  const double init[1] = {1.0};
  IntegrateOptions opts{100, {"x"}};
  const auto traj = integrate(linear(0.0), init, TimeGrid::make(0.0, 1.05, 1e-3), rule, opts);
  std::vector<double> ts(traj.times().begin(), traj.times().end());
  CHECK(ts.front() == 0.0);
  CHECK(ts.back() == doctest::Approx(1.05));
  CHECK(std::count_if(ts.begin(), ts.end(), [](double t) { return std::abs(t - 0.123) < 1e-9; }) == 1);
  CHECK(traj.columns() == std::vector<std::string>{"x"});
}

TEST_CASE("divergence carries the last finite state") {
  VectorField blowup = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
  const double init[1] = {1.0};
  try {
    (void)integrate(blowup, init, TimeGrid::make(0.0, 5.0, 0.01), EventRule{});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    REQUIRE(e.last_state().size() == 1);
    CHECK(std::isfinite(e.last_state()[0]));
    CHECK(e.last_time() < 5.0);
  }
}

TEST_CASE("event times off the grid are rejected") {
  TimeGrid g = TimeGrid::make(0.0, 1.0, 0.1);
  CHECK(g.snap(0.3) == 3);
  CHECK(g.snap(0.34) == 3);
  CHECK_THROWS_AS((void)g.snap(1.2), ConfigError);
  CHECK_THROWS_AS(TimeGrid::make(0.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(TimeGrid::make(1.0, 0.0, 0.1), ConfigError);
  EventRule twice{{0.30, 0.31}, "e", [](std::size_t, double, std::span<const double> pre) {
                    return State(pre.begin(), pre.end());
                  }};
  const double init[1] = {1.0};
  CHECK_THROWS_AS((void)integrate(linear(0.0), init, g, twice), ConfigError);
}

TEST_CASE("resample interpolates and honours jumps") {
  Trajectory t({"x"});
  const double a[1] = {0.0};
  const double b[1] = {2.0};
  t.append(0.0, a);
  t.append(1.0, b);
  const double q[2] = {0.5, 1.0};
  const auto v = resample(t, q);
  CHECK(v[0][0] == 1.0);
  CHECK(v[1][0] == 2.0);
  const double outside[1] = {1.5};
  CHECK_THROWS_AS((void)resample(t, outside), RangeError);

  // Segment ending on a jump uses the pre-jump value.
  EventRule rule{{0.5}, "e", [](std::size_t, double, std::span<const double>) { return State{10.0}; }};
  const double init[1] = {1.0};
  IntegrateOptions opts{10, {"x"}};
  const auto traj = integrate(linear(0.0), init, TimeGrid::make(0.0, 1.0, 0.1), rule, opts);
  const double mid[1] = {0.25};
  CHECK(resample(traj, mid)[0][0] == doctest::Approx(1.0));
}

TEST_CASE("resample at stored samples is exact") {
  const double init[1] = {1.0};
  IntegrateOptions opts{7, {"x"}};
  const auto traj = integrate(linear(-1.0), init, TimeGrid::make(0.0, 1.0, 1e-3), EventRule{}, opts);
  std::vector<double> ts(traj.times().begin(), traj.times().end());
  const auto v = resample(traj, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(v[i][0] == traj.value(i, 0));
}

TEST_CASE("csv writers") {
  EventRule rule{{0.5}, "e", [](std::size_t, double, std::span<const double>) { return State{2.0, 3.0}; }};
  VectorField zero = [](double, std::span<const double>, std::span<double> dy) { dy[0] = dy[1] = 0.0; };
  const double init[2] = {1.0, 1.5};
  const auto traj = integrate(zero, init, TimeGrid::make(0.0, 1.0, 0.5), rule, IntegrateOptions{1, {"x", "mu"}});
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  CHECK(csv.str() == "t,x,mu\n0,1,1.5\n0.5,2,3\n1,2,3\n");
  std::ostringstream ev;
  write_events_csv(ev, traj);
  CHECK(ev.str() == "t,label,pre,post\n0.5,e,1 1.5,2 3\n");
}

}
