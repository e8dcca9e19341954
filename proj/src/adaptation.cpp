#include "critlab/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "critlab/csv.hpp"
#include "critlab/errors.hpp"

namespace critlab {

std::string Interval::to_string() const {
  return std::string(lo_open ? "(" : "[") + format_double(lo) + ", " + format_double(hi) + "]";
}

Interval default_gain_domain(double mu0) { return Interval{0.0, 2.0 * mu0, false}; }

AdaptationLaw::AdaptationLaw(Fn f, Fn g, Interval domain_x, Interval domain_mu, std::string description)
    : kind_(Kind::Custom),
      f_(std::move(f)),
      g_(std::move(g)),
      domain_x_(domain_x),
      domain_mu_(domain_mu),
      description_(std::move(description)) {
  if (!f_ || !g_) throw ConfigError("adaptation law needs both f and g");
}

AdaptationLaw AdaptationLaw::affine(const AffineLawParams& p, Interval domain_x, Interval domain_mu) {
  for (double v : {p.a, p.b, p.c, p.eps}) {
    if (!std::isfinite(v)) throw ConfigError("affine law: non-finite parameter");
  }
  if (p.eps == 0.0) return frozen(domain_x, domain_mu);
  AdaptationLaw law;
  law.kind_ = Kind::Affine;
  law.affine_ = p;
  law.domain_x_ = domain_x;
  law.domain_mu_ = domain_mu;
  std::ostringstream d;
  d << "affine(a=" << format_double(p.a) << ", b=" << format_double(p.b) << ", c=" << format_double(p.c)
    << ", eps=" << format_double(p.eps) << ")";
  law.description_ = d.str();
  return law;
}

AdaptationLaw AdaptationLaw::lorentzian(const LorentzianLawParams& p, Interval domain_x, Interval domain_mu) {
  if (!(p.width != 0.0) || !std::isfinite(p.width)) throw ConfigError("lorentzian law: width must be nonzero");
  const LorentzianLawParams q = p;
  AdaptationLaw law(
      [q](double x) {
        const double u = x / q.width;
        return q.height / (1.0 + u * u);
      },
      [q](double mu) { return q.slope * mu - q.offset; }, domain_x, domain_mu);
  law.kind_ = Kind::Lorentzian;
  std::ostringstream d;
  d << "lorentzian(height=" << format_double(p.height) << ", width=" << format_double(p.width)
    << ", slope=" << format_double(p.slope) << ", offset=" << format_double(p.offset) << ")";
  law.description_ = d.str();
  return law;
}

namespace {

using Points = std::vector<std::pair<double, double>>;

void check_table(const Points& pts, const char* which) {
  if (pts.size() < 2) throw ConfigError(std::string("table law: ") + which + " needs at least two points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].first) || !std::isfinite(pts[i].second)) {
      throw ConfigError(std::string("table law: non-finite entry in ") + which);
    }
    if (i > 0 && !(pts[i].first > pts[i - 1].first)) {
      throw ConfigError(std::string("table law: abscissae of ") + which + " must be strictly increasing");
    }
  }
}

double interpolate(const Points& pts, double v) {
  if (v <= pts.front().first) return pts.front().second;
  if (v >= pts.back().first) return pts.back().second;
  const auto it = std::upper_bound(pts.begin(), pts.end(), v,
                                   [](double a, const std::pair<double, double>& p) { return a < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (v - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

}  // namespace

AdaptationLaw AdaptationLaw::table(Points f_points, Points g_points) {
  check_table(f_points, "f");
  check_table(g_points, "g");
  const Interval dx{f_points.front().first, f_points.back().first, false};
  const Interval dmu{g_points.front().first, g_points.back().first, false};
  auto fp = std::make_shared<const Points>(std::move(f_points));
  auto gp = std::make_shared<const Points>(std::move(g_points));
  AdaptationLaw law([fp](double x) { return interpolate(*fp, x); },
                    [gp](double mu) { return interpolate(*gp, mu); }, dx, dmu, "table");
  law.kind_ = Kind::Table;
  return law;
}

AdaptationLaw AdaptationLaw::frozen(Interval domain_x, Interval domain_mu) {
  AdaptationLaw law;
  law.kind_ = Kind::Frozen;
  law.domain_x_ = domain_x;
  law.domain_mu_ = domain_mu;
  law.description_ = "frozen";
  return law;
}

AdaptationLaw AdaptationLaw::with_domains(Interval domain_x, Interval domain_mu) const {
  AdaptationLaw copy = *this;
  copy.domain_x_ = domain_x;
  copy.domain_mu_ = domain_mu;
  return copy;
}

std::optional<AffineLawParams> AdaptationLaw::affine_params() const {
  if (kind_ == Kind::Affine) return affine_;
  return std::nullopt;
}

double AdaptationLaw::rate(double x, double mu) const {
  if (!domain_x_.contains(x)) {
    throw RangeError("rate: x=" + format_double(x) + " outside " + domain_x_.to_string());
  }
  if (!domain_mu_.contains(mu)) {
    throw RangeError("rate: mu=" + format_double(mu) + " outside " + domain_mu_.to_string());
  }
  return f(x) - g(mu);
}

namespace {

// n points covering the interval; an open lower end is excluded.
std::vector<double> probe_grid(const Interval& d, std::size_t n) {
  std::vector<double> pts(n);
  if (d.lo_open) {
    const double h = (d.hi - d.lo) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = d.lo + static_cast<double>(i + 1) * h;
  } else {
    const double h = (d.hi - d.lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) pts[i] = d.lo + static_cast<double>(i) * h;
  }
  pts.back() = d.hi;
  return pts;
}

void check_domain(const Interval& d, const char* name) {
  if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || !(d.hi > d.lo)) {
    throw ConfigError(std::string("degenerate domain for ") + name + ": " + d.to_string());
  }
}

}  // namespace

ValidityReport validate(const AdaptationLaw& law, std::size_t n_probe) {
  if (n_probe < 2) throw ConfigError("validate: n_probe must be at least 2");
  check_domain(law.domain_x(), "x");
  check_domain(law.domain_mu(), "mu");

  ValidityReport report;
  const auto xs = probe_grid(law.domain_x(), n_probe);
  const auto mus = probe_grid(law.domain_mu(), n_probe);

  std::vector<double> fv(n_probe), gv(n_probe);
  for (std::size_t i = 0; i < n_probe; ++i) {
    fv[i] = law.f(xs[i]);
    gv[i] = law.g(mus[i]);
    if (!std::isfinite(fv[i])) throw EvaluationError("f(" + format_double(xs[i]) + ") is not finite");
    if (!std::isfinite(gv[i])) throw EvaluationError("g(" + format_double(mus[i]) + ") is not finite");
  }

  report.f_non_increasing = true;
  bool any_decrease = false;
  for (std::size_t i = 0; i + 1 < n_probe; ++i) {
    if (fv[i + 1] > fv[i]) {
      report.f_non_increasing = false;
      report.f_violation = MonotonicityViolation{xs[i], xs[i + 1], fv[i], fv[i + 1]};
      break;
    }
    if (fv[i + 1] < fv[i]) any_decrease = true;
  }
  report.f_constant = report.f_non_increasing && !any_decrease;

  report.g_strictly_increasing = true;
  for (std::size_t i = 0; i + 1 < n_probe; ++i) {
    if (!(gv[i + 1] > gv[i])) {
      report.g_strictly_increasing = false;
      report.g_violation = MonotonicityViolation{mus[i], mus[i + 1], gv[i], gv[i + 1]};
      break;
    }
  }
  return report;
}

std::string ValidityReport::summary() const {
  std::ostringstream s;
  if (valid()) {
    s << "valid";
    if (f_constant) s << " (warning: f is constant; fixed point x* is not unique)";
    return s.str();
  }
  s << "invalid:";
  if (f_violation) {
    const auto& v = *f_violation;
    s << " f is not decreasing (f(" << format_double(v.at_lo) << ")=" << format_double(v.value_lo) << " < f("
      << format_double(v.at_hi) << ")=" << format_double(v.value_hi) << ")";
  }
  if (g_violation) {
    const auto& v = *g_violation;
    s << " g is not strictly increasing (g(" << format_double(v.at_lo) << ")=" << format_double(v.value_lo)
      << " >= g(" << format_double(v.at_hi) << ")=" << format_double(v.value_hi) << ")";
  }
  return s.str();
}

FixedPoint fixed_point(const AdaptationLaw& law, double mu0) {
  if (law.is_frozen()) throw NoFixedPointError("frozen law has no fixed point");
  if (!std::isfinite(mu0)) throw ConfigError("fixed_point: non-finite mu0");
  const double target = law.g(mu0);
  const double tol = 1e-12 * std::max(1.0, std::abs(target));

  const Interval& d = law.domain_x();
  double lo = d.lo;
  double hi = d.hi;
  double f_lo = law.f(lo);
  if (!std::isfinite(f_lo)) {
    lo = std::nextafter(lo, hi);
    f_lo = law.f(lo);
  }
  const double f_hi = law.f(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) throw EvaluationError("fixed_point: f not finite at domain ends");
  if (target > f_lo + tol || target < f_hi - tol) {
    throw NoFixedPointError("g(mu0)=" + format_double(target) + " outside the range [" + format_double(f_hi) +
                            ", " + format_double(f_lo) + "] of f on " + d.to_string());
  }
  if (std::abs(f_lo - target) <= tol) return FixedPoint{lo, mu0};
  if (std::abs(f_hi - target) <= tol) return FixedPoint{hi, mu0};

  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = law.f(mid);
    if (fm > target) {
      lo = mid;
    } else if (fm < target) {
      hi = mid;
    } else {
      return FixedPoint{mid, mu0};
    }
  }
  const double x = std::abs(law.f(lo) - target) <= std::abs(law.f(hi) - target) ? lo : hi;
  if (std::abs(law.f(x) - target) > tol) {
    throw NoFixedPointError("fixed_point: bisection did not reach tolerance (f discontinuous?)");
  }
  return FixedPoint{x, mu0};
}

}  // namespace critlab
