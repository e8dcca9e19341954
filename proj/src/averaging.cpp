#include "critlab/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "critlab/csv.hpp"
#include "critlab/errors.hpp"

namespace critlab {

double OccupancyHistogram::expectation(const std::function<double(double)>& alpha) const {
  double s = 0.0;
  for (std::size_t i = 0; i < bins(); ++i) {
    if (weights[i] != 0.0) s += weights[i] * alpha(center(i));
  }
  return s;
}

namespace {

void check_window(const Trajectory& traj, TimeWindow w) {
  if (traj.size() < 2) throw RangeError("trajectory needs at least two samples");
  if (!(w.t1 > w.t0)) throw RangeError("empty window [" + format_double(w.t0) + ", " + format_double(w.t1) + "]");
  if (w.t0 < traj.t_front() || w.t1 > traj.t_back()) {
    throw RangeError("window [" + format_double(w.t0) + ", " + format_double(w.t1) + "] outside trajectory span");
  }
}

// Calls visit(ta, tb, va, vb) for each linear piece of the column restricted
// to the window. Pieces ending on a jump use the pre-jump value at their end.
template <class Visit>
void for_each_piece(const Trajectory& traj, TimeWindow w, std::size_t col, Visit&& visit) {
  const auto ts = traj.times();
  const auto vs = traj.column(col);
  auto first = std::upper_bound(ts.begin(), ts.end(), w.t0);
  std::size_t i = static_cast<std::size_t>(first - ts.begin());
  if (i == 0) i = 1;
  for (; i < ts.size(); ++i) {
    const double ta = ts[i - 1];
    const double tb = ts[i];
    if (ta >= w.t1) break;
    const double va = vs[i - 1];
    double vb = vs[i];
    if (const Event* e = traj.event_at(tb); e && col < e->pre.size()) vb = e->pre[col];
    const double lo = std::max(ta, w.t0);
    const double hi = std::min(tb, w.t1);
    if (!(hi > lo)) continue;
    const double slope = (vb - va) / (tb - ta);
    visit(lo, hi, va + slope * (lo - ta), va + slope * (hi - ta));
  }
}

OccupancyHistogram build(const Trajectory& traj, TimeWindow w, std::size_t n_bins, double lo, double hi,
                         std::size_t col) {
  OccupancyHistogram h;
  h.window = w;
  h.edges.resize(n_bins + 1);
  const double bw = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = lo + bw * static_cast<double>(i);
  h.edges.back() = hi;
  h.weights.assign(n_bins, 0.0);

  auto bin_of = [&](double v) {
    const double k = std::floor((v - lo) / bw);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n_bins - 1)));
  };

  for_each_piece(traj, w, col, [&](double ta, double tb, double va, double vb) {
    const double dur = tb - ta;
    if (va == vb) {
      h.weights[bin_of(va)] += dur;
      return;
    }
    const double x0 = std::min(va, vb);
    const double x1 = std::max(va, vb);
    const double span = x1 - x0;
    const std::size_t b0 = bin_of(x0);
    const std::size_t b1 = bin_of(x1);
    if (b0 == b1) {
      h.weights[b0] += dur;
      return;
    }
    // x is linear in t, so time in a bin is proportional to the x-overlap.
    for (std::size_t b = b0; b <= b1; ++b) {
      const double l = b == b0 ? x0 : h.edges[b];
      const double r = b == b1 ? x1 : h.edges[b + 1];
      if (r > l) h.weights[b] += dur * (r - l) / span;
    }
  });

  const double total = std::accumulate(h.weights.begin(), h.weights.end(), 0.0);
  if (!(total > 0.0)) throw RangeError("occupancy: window holds no time");
  for (double& v : h.weights) v /= total;
  return h;
}

}  // namespace

OccupancyHistogram occupancy(const Trajectory& traj, TimeWindow window, std::size_t n_bins, double lo, double hi,
                             const std::string& column) {
  check_window(traj, window);
  if (n_bins < 1) throw ConfigError("occupancy: n_bins must be at least 1");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("occupancy: bad bin range");
  return build(traj, window, n_bins, lo, hi, traj.column_index(column));
}

OccupancyHistogram occupancy(const Trajectory& traj, TimeWindow window, std::size_t n_bins,
                             const std::string& column) {
  check_window(traj, window);
  if (n_bins < 1) throw ConfigError("occupancy: n_bins must be at least 1");
  const std::size_t col = traj.column_index(column);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for_each_piece(traj, window, col, [&](double, double, double va, double vb) {
    lo = std::min({lo, va, vb});
    hi = std::max({hi, va, vb});
  });
  if (!(hi > lo)) {
    // Constant over the window: centre a bin on the value.
    const double w = std::max(std::abs(lo), 1.0) * 1e-9;
    const double k = static_cast<double>(n_bins / 2);
    const double v = lo;
    lo = v - (k + 0.5) * w;
    hi = lo + static_cast<double>(n_bins) * w;
  }
  return build(traj, window, n_bins, lo, hi, col);
}

namespace {

double level_expectation_f(const OccupancyHistogram& hist, const AdaptationLaw& law) {
  double s = 0.0;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    if (hist.weights[i] == 0.0) continue;
    const double c = hist.center(i);
    if (!law.domain_x().contains(c)) {
      throw RangeError("bin centre " + format_double(c) + " outside " + law.domain_x().to_string());
    }
    s += hist.weights[i] * law.f(c);
  }
  return s;
}

}  // namespace

double averaged_rate(const OccupancyHistogram& hist, const AdaptationLaw& law, double mu) {
  return level_expectation_f(hist, law) - law.g(mu);
}

double compatibility_residual(const OccupancyHistogram& hist, const AdaptationLaw& law, double mu0) {
  const FixedPoint fp = fixed_point(law, mu0);
  return level_expectation_f(hist, law) - law.f(fp.x_star);
}

double total_variation(const OccupancyHistogram& a, const OccupancyHistogram& b) {
  if (a.edges != b.edges) throw ConfigError("total_variation: histograms have different bins");
  double s = 0.0;
  for (std::size_t i = 0; i < a.bins(); ++i) s += std::abs(a.weights[i] - b.weights[i]);
  return 0.5 * s;
}

void write_histogram_csv(std::ostream& out, const OccupancyHistogram& hist) {
  out << "bin_lo,bin_hi,weight\n";
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    out << format_double(hist.edges[i]) << ',' << format_double(hist.edges[i + 1]) << ','
        << format_double(hist.weights[i]) << '\n';
  }
}

double time_average(const Trajectory& traj, TimeWindow window, const std::function<double(double)>& alpha,
                    const std::string& column) {
  check_window(traj, window);
  double acc = 0.0;
  for_each_piece(traj, window, traj.column_index(column), [&](double ta, double tb, double va, double vb) {
    acc += 0.5 * (tb - ta) * (alpha(va) + alpha(vb));
  });
  return acc / window.length();
}

TimeWindow periodic_regime_window(const Trajectory& traj, double fraction) {
  if (traj.size() < 2) throw RangeError("trajectory needs at least two samples");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("periodic regime fraction must be in (0, 1]");
  const double t1 = traj.t_back();
  const double t0 = t1 - fraction * (t1 - traj.t_front());
  return TimeWindow{t0, t1};
}

DriftGuard drift_guard(const Trajectory& traj, TimeWindow window, double cycle, double threshold,
                       const std::string& column) {
  check_window(traj, window);
  if (!(cycle > 0.0)) throw ConfigError("drift_guard: cycle must be positive");
  DriftGuard g;
  g.threshold = threshold;
  const auto n = static_cast<std::size_t>(std::floor(window.length() / cycle + 1e-9));
  g.cycles = n;
  if (n < 2) {
    g.passed = false;
    return g;
  }
  // Align cycles to the end of the window.
  const double start = window.t1 - static_cast<double>(n) * cycle;
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const TimeWindow cw{start + static_cast<double>(k) * cycle,
                        k + 1 == n ? window.t1 : start + static_cast<double>(k + 1) * cycle};
    const double m = time_average(traj, cw, [](double v) { return v; }, column);
    if (k > 0) g.max_cycle_drift = std::max(g.max_cycle_drift, std::abs(m - prev));
    prev = m;
  }
  g.passed = g.max_cycle_drift <= threshold;
  return g;
}

PeriodicRegimeStats periodic_regime_stats(const Trajectory& traj, double mu0, const SaccadeSchedule& schedule,
                                          double fraction) {
  PeriodicRegimeStats s;
  s.window = periodic_regime_window(traj, fraction);
  s.mean_gain_error = time_average(traj, s.window, [mu0](double mu) { return mu - mu0; }, "mu");
  s.guard = drift_guard(traj, s.window, schedule.cycle(), 1e-3 * std::abs(mu0), "mu");

  const std::size_t xc = traj.column_index("x");
  const auto& events = traj.events();
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    if (events[i].t < s.window.t0 || events[i + 1].t > s.window.t1) continue;
    const double start = events[i].post[xc];
    const double end = events[i + 1].pre[xc];
    s.max_saccade_drift = std::max(s.max_saccade_drift, std::abs(end - start) / start);
    ++s.saccade_pairs;
  }
  return s;
}

}  // namespace critlab
