#pragma once

// Fixed-step RK4 integration of smooth vector fields interleaved with
// time-scheduled state jumps, plus the trajectory container shared by every
// model in the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "critlab/errors.hpp"

namespace critlab {

using State = std::vector<double>;

// dydt <- field(t, y). Dimensions of y and dydt always match.
using VectorField = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

// Returns the post-jump state for the `trigger`-th scheduled event.
using JumpMap = std::function<State(std::size_t trigger, double t, std::span<const double> pre)>;

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;

  // Validates dt > 0, t_end > t_start and a finite step count >= 1.
  static TimeGrid make(double t_start, double t_end, double dt);

  [[nodiscard]] std::size_t steps() const;
  [[nodiscard]] double time_at(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
  // Index of the grid time nearest to t; ConfigError if t is outside
  // [t_start, t_end] or more than dt/2 from every grid time.
  [[nodiscard]] std::size_t snap(double t) const;
};

struct EventRule {
  std::vector<double> times;  // strictly increasing
  std::string label = "event";
  JumpMap jump;

  [[nodiscard]] bool empty() const noexcept { return times.empty(); }
};

struct Event {
  double t = 0.0;
  std::string label;
  State pre;
  State post;
};

class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<std::string> columns);

  [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return names_; }
  [[nodiscard]] std::size_t dim() const noexcept { return names_.size(); }
  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }

  [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
  [[nodiscard]] double time(std::size_t i) const { return times_[i]; }
  [[nodiscard]] std::span<const double> column(std::size_t c) const { return data_[c]; }
  [[nodiscard]] std::span<const double> column(const std::string& name) const;
  [[nodiscard]] std::size_t column_index(const std::string& name) const;
  [[nodiscard]] double value(std::size_t i, std::size_t c) const { return data_[c][i]; }
  [[nodiscard]] State row(std::size_t i) const;

  // Value of sample i approached from the left: the pre-jump state when an
  // event sits at that sample, otherwise the stored sample.
  [[nodiscard]] State left_limit(std::size_t i) const;
  [[nodiscard]] const Event* event_at(double t) const;

  [[nodiscard]] const std::vector<Event>& events() const noexcept { return events_; }
  [[nodiscard]] double t_front() const { return times_.front(); }
  [[nodiscard]] double t_back() const { return times_.back(); }

  void reserve(std::size_t n);
  void append(double t, std::span<const double> state);
  void add_event(Event e);
  // Appends a derived column (one value per existing sample).
  void add_column(std::string name, std::vector<double> values);
  void rename_columns(std::vector<std::string> names);

 private:
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<std::vector<double>> data_;
  std::vector<Event> events_;
};

struct IntegrateOptions {
  std::size_t record_stride = 1;   // record every k-th step; events and the last step always recorded
  std::vector<std::string> columns;  // defaults to y0, y1, ...
};

namespace detail {

struct NoGuard {
  void operator()(double, std::span<const double>) const noexcept {}
};

struct SnappedEvents {
  std::vector<std::size_t> index;  // grid index of each trigger
};

SnappedEvents snap_events(const TimeGrid& grid, const EventRule& events);
std::vector<std::string> default_columns(std::size_t dim);
[[noreturn]] void throw_divergence(double t, std::span<const double> last_finite);

inline bool all_finite(std::span<const double> y) noexcept {
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace detail

namespace detail {

template <class Field>
concept FixedDimensionField = requires { { std::remove_cvref_t<Field>::kDimension } -> std::convertible_to<std::size_t>; };

template <class Vec, class Field, class Guard>
Trajectory rk4_loop(Field& field, std::span<const double> init, const TimeGrid& grid, const EventRule& events,
                    const IntegrateOptions& options, Guard& guard) {
  const std::size_t n = grid.steps();
  const std::size_t dim = init.size();
  const std::size_t stride = options.record_stride == 0 ? 1 : options.record_stride;
  if (!events.empty() && !events.jump) throw ConfigError("integrate: event rule without jump map");
  const auto snapped = snap_events(grid, events);

  Trajectory traj(options.columns.empty() ? default_columns(dim) : options.columns);
  if (traj.dim() != dim) throw ConfigError("integrate: column count does not match state dimension");
  traj.reserve(n / stride + snapped.index.size() + 2);

  Vec y{}, k1{}, k2{}, k3{}, k4{}, tmp{}, prev{};
  if constexpr (requires { y.resize(dim); }) {
    for (Vec* v : {&y, &k1, &k2, &k3, &k4, &tmp, &prev}) v->resize(dim);
  }
  std::copy(init.begin(), init.end(), y.begin());
  std::size_t next_event = 0;

  auto apply_events_at = [&](std::size_t k, double t) -> bool {
    bool fired = false;
    while (next_event < snapped.index.size() && snapped.index[next_event] == k) {
      const std::span<const double> pre(y.data(), dim);
      State post = events.jump(next_event, t, pre);
      if (post.size() != dim) throw ConfigError("integrate: jump map changed state dimension");
      if (!all_finite(post)) throw_divergence(t, pre);
      traj.add_event(Event{t, events.label, State(pre.begin(), pre.end()), post});
      std::copy(post.begin(), post.end(), y.begin());
      guard(t, std::span<const double>(y.data(), dim));
      ++next_event;
      fired = true;
    }
    return fired;
  };

  const double t0 = grid.time_at(0);
  guard(t0, std::span<const double>(y.data(), dim));
  apply_events_at(0, t0);
  traj.append(t0, std::span<const double>(y.data(), dim));

  const double h = grid.dt;
  std::size_t until_record = stride;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.time_at(k);
    const double t_mid = t + 0.5 * h;
    const double t_next = grid.time_at(k + 1);
    prev = y;

    field(t, std::span<const double>(y.data(), dim), std::span<double>(k1.data(), dim));
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    field(t_mid, std::span<const double>(tmp.data(), dim), std::span<double>(k2.data(), dim));
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    field(t_mid, std::span<const double>(tmp.data(), dim), std::span<double>(k3.data(), dim));
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
    field(t_next, std::span<const double>(tmp.data(), dim), std::span<double>(k4.data(), dim));
    bool finite = true;
    for (std::size_t i = 0; i < dim; ++i) {
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      finite = finite && std::isfinite(y[i]);
    }
    if (!finite) throw_divergence(t, std::span<const double>(prev.data(), dim));
    guard(t_next, std::span<const double>(y.data(), dim));

    const bool fired = next_event < snapped.index.size() && snapped.index[next_event] == k + 1 &&
                       apply_events_at(k + 1, t_next);
    if (--until_record == 0) until_record = stride;
    if (fired || until_record == stride || k + 1 == n) traj.append(t_next, std::span<const double>(y.data(), dim));
  }
  return traj;
}

}  // namespace detail

// Classical RK4 on `grid`, applying each scheduled jump right after the step
// that lands on its (snapped) trigger time. `guard(t, y)` runs after every
// step and every jump and may throw to abort the run. Fields that declare a
// static `kDimension` get fixed-size stack storage.
template <class Field, class Guard = detail::NoGuard>
Trajectory integrate(Field&& field, std::span<const double> init, const TimeGrid& grid,
                     const EventRule& events, const IntegrateOptions& options = {},
                     Guard&& guard = {}) {
  if (init.empty()) throw ConfigError("integrate: empty initial state");
  if (!detail::all_finite(init)) throw ConfigError("integrate: non-finite initial state");
  if constexpr (detail::FixedDimensionField<Field>) {
    constexpr std::size_t N = std::remove_cvref_t<Field>::kDimension;
    if (init.size() != N) throw ConfigError("integrate: initial state does not match field dimension");
    return detail::rk4_loop<std::array<double, N>>(field, init, grid, events, options, guard);
  } else {
    return detail::rk4_loop<State>(field, init, grid, events, options, guard);
  }
}

// Linear interpolation of every column at the requested times. Exact at
// stored samples; inside a segment that ends on a jump the pre-jump value is
// used as the right endpoint. RangeError for times outside the span.
std::vector<State> resample(const Trajectory& traj, std::span<const double> times);

// CSV with a `t,<columns...>` header, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
// Events as `t,label,pre,post`; multi-dimensional states are
// space-separated inside a field.
void write_events_csv(std::ostream& out, const Trajectory& traj);

}  // namespace critlab
