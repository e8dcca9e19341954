#pragma once

// Adaptation laws  dmu/dt = f(x) - g(mu)  and the sufficient conditions under
// which they tune mu to the critical gain: g strictly increasing, f
// non-increasing, and a level x* with f(x*) = g(mu0).

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace critlab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_open = false;

  [[nodiscard]] bool contains(double v) const noexcept {
    return (lo_open ? v > lo : v >= lo) && v <= hi;
  }
  [[nodiscard]] std::string to_string() const;
};

// Firing rates live in (0, 1000] Hz unless a model says otherwise.
inline constexpr Interval kDefaultRateDomain{0.0, 1000.0, true};
inline constexpr Interval kDefaultGainDomain{0.0, 1000.0, false};
// [0, 2 mu0] once the critical gain is known.
Interval default_gain_domain(double mu0);

// mu' = eps (c - a x - b mu), i.e. f(x) = eps (c - a x), g(mu) = eps b mu.
struct AffineLawParams {
  double a = 1.0;    // s^-1 per Hz
  double b = 0.01;   // s^-1
  double c = 42.0;   // s^-2
  double eps = 0.01;
};

// f(x) = height / (1 + (x / width)^2), g(mu) = slope * mu - offset.
struct LorentzianLawParams {
  double height = 1.0;
  double width = 1.0;
  double slope = 1.0;
  double offset = 0.5;
};

class AdaptationLaw {
 public:
  using Fn = std::function<double(double)>;
  enum class Kind { Affine, Lorentzian, Table, Custom, Frozen };

  AdaptationLaw(Fn f, Fn g, Interval domain_x, Interval domain_mu, std::string description = "custom");

  static AdaptationLaw affine(const AffineLawParams& p, Interval domain_x = kDefaultRateDomain,
                              Interval domain_mu = kDefaultGainDomain);
  static AdaptationLaw lorentzian(const LorentzianLawParams& p, Interval domain_x,
                                  Interval domain_mu = kDefaultGainDomain);
  // Piecewise-linear f and g through the given (abscissa, value) points;
  // abscissae strictly increasing. Domains are the abscissa spans.
  static AdaptationLaw table(std::vector<std::pair<double, double>> f_points,
                             std::vector<std::pair<double, double>> g_points);
  // mu' == 0. Not a valid tuning law; simulators accept it to run with the
  // gain held fixed.
  static AdaptationLaw frozen(Interval domain_x = kDefaultRateDomain,
                              Interval domain_mu = kDefaultGainDomain);

  [[nodiscard]] double f(double x) const {
    switch (kind_) {
      case Kind::Affine: return affine_.eps * (affine_.c - affine_.a * x);
      case Kind::Frozen: return 0.0;
      default: return f_(x);
    }
  }
  [[nodiscard]] double g(double mu) const {
    switch (kind_) {
      case Kind::Affine: return affine_.eps * affine_.b * mu;
      case Kind::Frozen: return 0.0;
      default: return g_(mu);
    }
  }

  // f(x) - g(mu); RangeError outside the domains.
  [[nodiscard]] double rate(double x, double mu) const;

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_frozen() const noexcept { return kind_ == Kind::Frozen; }
  [[nodiscard]] std::optional<AffineLawParams> affine_params() const;
  [[nodiscard]] const Interval& domain_x() const noexcept { return domain_x_; }
  [[nodiscard]] const Interval& domain_mu() const noexcept { return domain_mu_; }
  [[nodiscard]] const std::string& description() const noexcept { return description_; }

  [[nodiscard]] AdaptationLaw with_domains(Interval domain_x, Interval domain_mu) const;

 private:
  AdaptationLaw() = default;

  Kind kind_ = Kind::Custom;
  AffineLawParams affine_{};
  Fn f_;
  Fn g_;
  Interval domain_x_ = kDefaultRateDomain;
  Interval domain_mu_ = kDefaultGainDomain;
  std::string description_;
};

struct MonotonicityViolation {
  double at_lo = 0.0;     // probe abscissae of the offending pair
  double at_hi = 0.0;
  double value_lo = 0.0;
  double value_hi = 0.0;
};

struct ValidityReport {
  bool f_non_increasing = false;
  bool g_strictly_increasing = false;
  bool f_constant = false;  // warning: x* is then not unique
  std::optional<MonotonicityViolation> f_violation;
  std::optional<MonotonicityViolation> g_violation;

  [[nodiscard]] bool valid() const noexcept { return f_non_increasing && g_strictly_increasing; }
  [[nodiscard]] std::string summary() const;
};

inline constexpr std::size_t kDefaultProbeCount = 1024;

// Dense-sampling check of the monotonicity conditions. EvaluationError on a
// non-finite f or g value, ConfigError for n_probe < 2 or a degenerate domain.
ValidityReport validate(const AdaptationLaw& law, std::size_t n_probe = kDefaultProbeCount);

struct FixedPoint {
  double x_star = 0.0;
  double mu_star = 0.0;
};

// Solves f(x*) = g(mu0) by bisection over domain_x. NoFixedPointError when
// g(mu0) lies outside the range of f.
FixedPoint fixed_point(const AdaptationLaw& law, double mu0);

}  // namespace critlab
