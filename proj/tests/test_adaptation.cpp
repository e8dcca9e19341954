#include <doctest.h>

#include <cmath>
#include <random>

#include "critlab/adaptation.hpp"
#include "critlab/errors.hpp"

using namespace critlab;

namespace {

const AffineLawParams kNominal{1.0, 0.01, 42.0, 0.01};

AdaptationLaw hair_cell_law() {
  return AdaptationLaw::lorentzian(LorentzianLawParams{1.0, 1.0, 1.0, 0.5}, Interval{0.0, 10.0, true},
                                   Interval{0.0, 3.0, false});
}

}  // namespace

TEST_SUITE("adaptation") {

TEST_CASE("validity of the reference laws") {
  CHECK(validate(AdaptationLaw::affine(kNominal)).valid());
  CHECK(validate(hair_cell_law()).valid());

  AffineLawParams flipped = kNominal;
  flipped.a = -1.0;
  const ValidityReport bad = validate(AdaptationLaw::affine(flipped));
  CHECK_FALSE(bad.valid());
  CHECK_FALSE(bad.f_non_increasing);
  CHECK(bad.summary().find("f is not decreasing") != std::string::npos);

  AffineLawParams flat_g = kNominal;
  flat_g.b = 0.0;
  const ValidityReport flat = validate(AdaptationLaw::affine(flat_g));
  CHECK_FALSE(flat.g_strictly_increasing);
}

TEST_CASE("constant f is valid but flagged") {
  const AdaptationLaw law([](double) { return 1.0; }, [](double mu) { return mu; }, Interval{0.0, 5.0, true},
                          Interval{0.0, 5.0, false});
  const auto r = validate(law);
  CHECK(r.valid());
  CHECK(r.f_constant);
  CHECK(r.summary().find("warning") != std::string::npos);
}

TEST_CASE("non-finite values are reported") {
  const AdaptationLaw law([](double x) { return 1.0 / (x - 2.5); }, [](double mu) { return mu; },
                          Interval{0.0, 5.0, false}, Interval{0.0, 5.0, false});
  CHECK_THROWS_AS((void)validate(law, 3), EvaluationError);
  CHECK_THROWS_AS((void)validate(AdaptationLaw::affine(kNominal), 1), ConfigError);
}

TEST_CASE("fixed points") {
  // Hand-solved: eps(c - a x*) = eps b mu0.
  CHECK(fixed_point(AdaptationLaw::affine(kNominal), 200.0).x_star == doctest::Approx(40.0).epsilon(1e-12));
  AffineLawParams left = kNominal;
  left.c = 40.1;
  CHECK(fixed_point(AdaptationLaw::affine(left), 10.0).x_star == doctest::Approx(40.0).epsilon(1e-12));
  // 1/(1+r^2) = 1/2 at r = 1.
  CHECK(fixed_point(hair_cell_law(), 1.0).x_star == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("no fixed point outside the range of f") {
  CHECK_THROWS_AS((void)fixed_point(AdaptationLaw::affine(kNominal), 5000.0), NoFixedPointError);
  CHECK_THROWS_AS((void)fixed_point(AdaptationLaw::frozen(), 1.0), NoFixedPointError);
}

TEST_CASE("rate at reference points") {
  const AdaptationLaw law = AdaptationLaw::affine(kNominal);
  CHECK(law.rate(40.0, 200.0) == doctest::Approx(0.0));
  CHECK(law.rate(60.0, 200.0) == doctest::Approx(-0.20).epsilon(1e-12));
  CHECK_THROWS_AS((void)law.rate(-1.0, 200.0), RangeError);
  CHECK_THROWS_AS((void)law.rate(40.0, 2000.0), RangeError);
}

TEST_CASE("random affine laws: closed-form fixed point and zero rate there") {
  std::mt19937 rng(20240607);
  std::uniform_real_distribution<double> a_d(0.1, 5.0), b_d(0.001, 1.0), mu_d(1.0, 300.0), x_d(1.0, 900.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = a_d(rng), b = b_d(rng), mu0 = mu_d(rng), xs = x_d(rng);
    const double c = a * xs + b * mu0;  // guarantees c > b mu0 and x* in the domain
    const AdaptationLaw law = AdaptationLaw::affine(AffineLawParams{a, b, c, 0.05}, kDefaultRateDomain,
                                                    Interval{0.0, 2.0 * mu0 + 1.0, false});
    const FixedPoint fp = fixed_point(law, mu0);
    CAPTURE(trial);
    CHECK(std::abs(fp.x_star - (c - b * mu0) / a) <= 1e-10 * ((c - b * mu0) / a));
    CHECK(std::abs(law.rate(fp.x_star, mu0)) <= 1e-10);
  }
}

TEST_CASE("random laws are monotone on random grids") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const AdaptationLaw laws[] = {AdaptationLaw::affine(kNominal), hair_cell_law()};
  for (const auto& law : laws) {
    const auto& dx = law.domain_x();
    const auto& dm = law.domain_mu();
    for (int i = 0; i < 2000; ++i) {
      double x1 = dx.lo + (dx.hi - dx.lo) * (0.001 + 0.999 * u(rng));
      double x2 = dx.lo + (dx.hi - dx.lo) * (0.001 + 0.999 * u(rng));
      if (x1 > x2) std::swap(x1, x2);
      CHECK(law.f(x1) >= law.f(x2));
      double m1 = dm.lo + (dm.hi - dm.lo) * u(rng);
      double m2 = dm.lo + (dm.hi - dm.lo) * u(rng);
      if (m1 == m2) continue;
      if (m1 > m2) std::swap(m1, m2);
      CHECK(law.g(m1) < law.g(m2));
    }
  }
}

TEST_CASE("table law interpolates and clamps") {
  const AdaptationLaw law = AdaptationLaw::table({{0.0, 2.0}, {10.0, 0.0}}, {{0.0, 0.0}, {4.0, 2.0}});
  CHECK(law.f(5.0) == doctest::Approx(1.0));
  CHECK(law.g(1.0) == doctest::Approx(0.5));
  CHECK(law.domain_x().hi == 10.0);
  CHECK(fixed_point(law, 2.0).x_star == doctest::Approx(5.0).epsilon(1e-10));
  CHECK_THROWS_AS(AdaptationLaw::table({{0.0, 1.0}}, {{0.0, 0.0}, {1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(AdaptationLaw::table({{1.0, 1.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 1.0}}), ConfigError);
}

TEST_CASE("zero prefactor freezes the law") {
  AffineLawParams p = kNominal;
  p.eps = 0.0;
  const AdaptationLaw law = AdaptationLaw::affine(p);
  CHECK(law.is_frozen());
  CHECK(law.f(12.0) - law.g(3.0) == 0.0);
}

}
