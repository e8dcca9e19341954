#include "critlab/dynamics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

#include "critlab/csv.hpp"

namespace critlab {

TimeGrid TimeGrid::make(double t_start, double t_end, double dt) {
  TimeGrid g{t_start, t_end, dt};
  (void)g.steps();
  return g;
}

std::size_t TimeGrid::steps() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !std::isfinite(dt)) {
    throw ConfigError("time grid: non-finite bounds or step");
  }
  if (!(dt > 0.0)) throw ConfigError("time grid: dt must be positive");
  if (!(t_end > t_start)) throw ConfigError("time grid: t_end must exceed t_start");
  const double n = std::round((t_end - t_start) / dt);
  if (!(n >= 1.0) || n > 1e13) throw ConfigError("time grid: step count must be finite and >= 1");
  return static_cast<std::size_t>(n);
}

std::size_t TimeGrid::snap(double t) const {
  const std::size_t n = steps();
  const double t_last = time_at(n);
  if (!std::isfinite(t) || t < t_start - 0.5 * dt || t > t_last + 0.5 * dt) {
    throw ConfigError("event time " + format_double(t) + " outside [" + format_double(t_start) + ", " +
                      format_double(t_end) + "]");
  }
  const double k = std::clamp(std::round((t - t_start) / dt), 0.0, static_cast<double>(n));
  const auto idx = static_cast<std::size_t>(k);
  if (std::abs(time_at(idx) - t) > 0.5 * dt * (1.0 + 1e-9)) {
    throw ConfigError("event time " + format_double(t) + " is more than dt/2 from the grid");
  }
  return idx;
}

namespace detail {

SnappedEvents snap_events(const TimeGrid& grid, const EventRule& events) {
  SnappedEvents s;
  s.index.reserve(events.times.size());
  for (std::size_t i = 0; i < events.times.size(); ++i) {
    if (i > 0 && !(events.times[i] > events.times[i - 1])) {
      throw ConfigError("event trigger times must be strictly increasing");
    }
    const std::size_t k = grid.snap(events.times[i]);
    if (!s.index.empty() && k <= s.index.back()) {
      throw ConfigError("two event triggers snap to the same grid time; reduce dt");
    }
    s.index.push_back(k);
  }
  return s;
}

std::vector<std::string> default_columns(std::size_t dim) {
  std::vector<std::string> names;
  names.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

void throw_divergence(double t, std::span<const double> last_finite) {
  throw DivergenceError("integration diverged after t=" + format_double(t), t,
                        State(last_finite.begin(), last_finite.end()));
}

}  // namespace detail

Trajectory::Trajectory(std::vector<std::string> columns)
    : names_(std::move(columns)), data_(names_.size()) {}

std::size_t Trajectory::column_index(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw RangeError("trajectory has no column '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> Trajectory::column(const std::string& name) const {
  return data_[column_index(name)];
}

State Trajectory::row(std::size_t i) const {
  State r(dim());
  for (std::size_t c = 0; c < dim(); ++c) r[c] = data_[c][i];
  return r;
}

const Event* Trajectory::event_at(double t) const {
  auto it = std::lower_bound(events_.begin(), events_.end(), t,
                             [](const Event& e, double v) { return e.t < v; });
  if (it != events_.end() && it->t == t) {
    // Several events may share a time; the earliest pre-state is the left limit.
    return &*it;
  }
  return nullptr;
}

State Trajectory::left_limit(std::size_t i) const {
  if (const Event* e = event_at(times_[i])) {
    State r = e->pre;
    // Derived columns are not part of the integrated state; fall back to the sample.
    for (std::size_t c = r.size(); c < dim(); ++c) r.push_back(data_[c][i]);
    return r;
  }
  return row(i);
}

void Trajectory::reserve(std::size_t n) {
  times_.reserve(n);
  for (auto& col : data_) col.reserve(n);
}

void Trajectory::append(double t, std::span<const double> state) {
  if (state.size() != dim()) throw ConfigError("trajectory append: dimension mismatch");
  if (!times_.empty() && !(t > times_.back())) {
    throw ConfigError("trajectory append: sample times must be strictly increasing");
  }
  times_.push_back(t);
  for (std::size_t c = 0; c < dim(); ++c) data_[c].push_back(state[c]);
}

void Trajectory::add_event(Event e) {
  if (!events_.empty() && e.t < events_.back().t) {
    throw ConfigError("trajectory events must be time ordered");
  }
  events_.push_back(std::move(e));
}

void Trajectory::add_column(std::string name, std::vector<double> values) {
  if (values.size() != size()) throw ConfigError("derived column length does not match sample count");
  names_.push_back(std::move(name));
  data_.push_back(std::move(values));
}

void Trajectory::rename_columns(std::vector<std::string> names) {
  if (names.size() != names_.size()) throw ConfigError("rename_columns: wrong column count");
  names_ = std::move(names);
}

std::vector<State> resample(const Trajectory& traj, std::span<const double> times) {
  if (traj.empty()) throw RangeError("resample: empty trajectory");
  const auto ts = traj.times();
  std::vector<State> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= ts.front() && t <= ts.back())) {
      throw RangeError("resample: time " + format_double(t) + " outside trajectory span [" +
                       format_double(ts.front()) + ", " + format_double(ts.back()) + "]");
    }
    const auto it = std::lower_bound(ts.begin(), ts.end(), t);
    const auto hi = static_cast<std::size_t>(it - ts.begin());
    if (ts[hi] == t) {
      out.push_back(traj.row(hi));
      continue;
    }
    const std::size_t lo = hi - 1;
    const State a = traj.row(lo);
    const State b = traj.left_limit(hi);
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    State v(traj.dim());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = a[c] + w * (b[c] - a[c]);
    out.push_back(std::move(v));
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (const auto& name : traj.columns()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.time(i));
    for (std::size_t c = 0; c < traj.dim(); ++c) out << ',' << format_double(traj.value(i, c));
    out << '\n';
  }
}

namespace {

std::string join_state(const State& s) {
  std::string r;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) r += ' ';
    r += format_double(s[i]);
  }
  return r;
}

}  // namespace

void write_events_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,label,pre,post\n";
  for (const auto& e : traj.events()) {
    out << format_double(e.t) << ',' << e.label << ',' << join_state(e.pre) << ',' << join_state(e.post)
        << '\n';
  }
}

}  // namespace critlab
