#pragma once

// Time-occupancy statistics of a trajectory and the averaged adaptation
// dynamics they induce, plus the periodic-regime statistics used by the
// saccade experiments.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "critlab/adaptation.hpp"
#include "critlab/dynamics.hpp"
#include "critlab/integrator.hpp"

namespace critlab {

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 1.0;

  [[nodiscard]] double length() const noexcept { return t1 - t0; }
};

struct OccupancyHistogram {
  std::vector<double> edges;    // n_bins + 1, increasing
  std::vector<double> weights;  // fraction of window time per bin, sums to 1
  TimeWindow window;

  [[nodiscard]] std::size_t bins() const noexcept { return weights.size(); }
  [[nodiscard]] double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  [[nodiscard]] double width() const { return edges.back() - edges.front(); }
  // sum_i w_i alpha(center_i)
  [[nodiscard]] double expectation(const std::function<double(double)>& alpha) const;
};

inline constexpr std::size_t kDefaultBins = 256;

// Time-weighted histogram of `column` over the window, bins spanning the
// column's [min, max] there. Each inter-sample segment is spread linearly
// across the bins it crosses; segments ending on a jump use the pre-jump value.
OccupancyHistogram occupancy(const Trajectory& traj, TimeWindow window, std::size_t n_bins = kDefaultBins,
                             const std::string& column = "x");
// Same, on caller-chosen bin range [lo, hi]; values outside are clamped into
// the end bins.
OccupancyHistogram occupancy(const Trajectory& traj, TimeWindow window, std::size_t n_bins, double lo, double hi,
                             const std::string& column = "x");

// sum_i w_i f(center_i) - g(mu)
double averaged_rate(const OccupancyHistogram& hist, const AdaptationLaw& law, double mu);

// sum_i w_i f(center_i) - f(x*)
double compatibility_residual(const OccupancyHistogram& hist, const AdaptationLaw& law, double mu0);

// Bins must match.
double total_variation(const OccupancyHistogram& a, const OccupancyHistogram& b);

void write_histogram_csv(std::ostream& out, const OccupancyHistogram& hist);

// (1/T) int_window alpha(column(t)) dt by the trapezoid rule on the samples,
// honouring jumps.
double time_average(const Trajectory& traj, TimeWindow window, const std::function<double(double)>& alpha,
                    const std::string& column = "x");

inline constexpr double kPeriodicRegimeFraction = 0.25;

// The final `fraction` of the trajectory span.
TimeWindow periodic_regime_window(const Trajectory& traj, double fraction = kPeriodicRegimeFraction);

struct DriftGuard {
  double max_cycle_drift = 0.0;  // largest change of the per-cycle mean between consecutive cycles
  double threshold = 0.0;
  std::size_t cycles = 0;
  bool passed = false;
};

// Per-cycle means of `column` inside the window; passes when consecutive means
// differ by at most `threshold`. Needs at least two full cycles.
DriftGuard drift_guard(const Trajectory& traj, TimeWindow window, double cycle, double threshold,
                       const std::string& column = "mu");

struct PeriodicRegimeStats {
  TimeWindow window;
  double mean_gain_error = 0.0;   // time-mean of mu - mu0
  double max_saccade_drift = 0.0; // max |x(t_{i+1}-) - x(t_i+)| / x(t_i+) over saccade pairs in the window
  std::size_t saccade_pairs = 0;
  DriftGuard guard;
};

// Statistics of a driven run over its periodic-regime window; the drift
// guard threshold is 1e-3 |mu0| per schedule cycle.
PeriodicRegimeStats periodic_regime_stats(const Trajectory& traj, double mu0, const SaccadeSchedule& schedule,
                                          double fraction = kPeriodicRegimeFraction);

}  // namespace critlab
