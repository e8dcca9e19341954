#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "critlab/config.hpp"

using namespace critlab;

namespace {

const std::filesystem::path kConfigs = CRITLAB_CONFIG_DIR;

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse handles comments and whitespace") {
  const auto cfg = RunConfig::parse_string("# header\n  mu0 = 200  # trailing\n\nlaw.a=1\nsaccade.levels = 20, 60\n");
  CHECK(cfg.get_double("mu0") == 200.0);
  CHECK(cfg.get_double("law.a") == 1.0);
  CHECK(cfg.get_list("saccade.levels") == std::vector<double>{20.0, 60.0});
  CHECK(cfg.values().size() == 3);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(RunConfig::parse_string("mu0 200\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("mu0 = 1\nmu0 = 2\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("bad key = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("schema = critlab-config/9\n"), ConfigError);
  const auto cfg = RunConfig::parse_string("mu0 = abc\nn = 1.5\nflag = maybe\n");
  CHECK_THROWS_AS((void)cfg.get_double("mu0"), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_count("n", 0), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_bool("flag", false), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_double("missing"), ConfigError);
  CHECK(cfg.get_double("missing", 3.0) == 3.0);
}

TEST_CASE("serialize round-trips") {
  for (const char* name : {"driven.conf", "oscillator.conf", "slow_base.conf", "fast_c.sweep"}) {
    CAPTURE(name);
    const auto cfg = RunConfig::load(kConfigs / name);
    const auto again = RunConfig::parse_string(cfg.serialize());
    CHECK(again == cfg);
    CHECK(again.serialize() == cfg.serialize());
  }
  RunConfig cfg;
  cfg.set("law.a", "1");
  CHECK_THROWS_AS(cfg.set("law.b", "1 # no"), ConfigError);
  CHECK_THROWS_AS(cfg.set("not valid", "1"), ConfigError);
}

TEST_CASE("unknown keys are rejected per flavour") {
  auto cfg = RunConfig::load(kConfigs / "driven.conf");
  CHECK_NOTHROW((void)build_integrator_run(cfg));
  cfg.set("oscillator.lambda", "1");
  CHECK_THROWS_WITH_AS((void)build_integrator_run(cfg), doctest::Contains("oscillator.lambda"), ConfigError);
}

TEST_CASE("integrator run defaults") {
  const auto cfg = RunConfig::parse_string(
      "mu0 = 200\nlaw.a = 1\nlaw.b = 0.01\nlaw.c = 42\nlaw.eps = 0.01\nsaccade.levels = 20, 60\nt_end = 10\n");
  const auto run = build_integrator_run(cfg);
  REQUIRE(run.schedule);
  CHECK(run.params.x_init == 20.0);
  CHECK(run.params.mu_init == 198.0);
  CHECK(run.grid.dt == doctest::Approx(5e-5));
  CHECK(run.schedule->t_first == 0.0);
  const auto law = build_law(cfg, 200.0, LawContext::Integrator);
  CHECK(law.domain_x().lo_open);
  CHECK(law.domain_x().hi == 1000.0);
  CHECK(law.domain_mu().hi == 400.0);
  CHECK_THROWS_AS((void)build_integrator_run(RunConfig::parse_string("mu0 = 200\nx_init = 1\n")), ConfigError);
}

TEST_CASE("law kinds") {
  const auto osc = RunConfig::load(kConfigs / "oscillator.conf");
  const auto law = build_law(osc, 1.0, LawContext::Oscillator);
  CHECK(law.kind() == AdaptationLaw::Kind::Lorentzian);
  CHECK(law.f(1.0) == doctest::Approx(0.5));
  CHECK(law.domain_x().hi == 100.0);
  CHECK_FALSE(law.domain_x().lo_open);
  CHECK_THROWS_AS((void)build_law(RunConfig::parse_string("law = cubic\n"), 1.0, LawContext::Integrator),
                  ConfigError);
}

TEST_CASE("table laws load relative to the config file") {
  const auto dir = std::filesystem::temp_directory_path() / "critlab_config_table";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "f.csv") << "x,f\n0,2\n10,0\n";
    std::ofstream(dir / "g.csv") << "0,0\n4,2\n";
    std::ofstream(dir / "run.conf") << "law = table\nlaw.f_table = f.csv\nlaw.g_table = g.csv\n";
  }
  const auto cfg = RunConfig::load(dir / "run.conf");
  const auto law = build_law(cfg, 2.0, LawContext::Integrator);
  CHECK(law.kind() == AdaptationLaw::Kind::Table);
  CHECK(law.f(5.0) == doctest::Approx(1.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("oscillator run") {
  const auto run = build_oscillator_run(RunConfig::load(kConfigs / "oscillator_frozen.conf"));
  CHECK(run.frozen);
  CHECK(run.params.mu_init == 0.0);
  CHECK(run.grid.t_end == 60.0);
}

TEST_CASE("sweep spec resolves its base config") {
  const auto spec = build_sweep_spec(RunConfig::load(kConfigs / "fast_c.sweep"));
  CHECK(spec.param == SweepParameter::C);
  CHECK(spec.multipliers.size() == 21);
  CHECK(spec.base.integrator.mu0 == 200.0);
  CHECK(spec.base.law.eps == 0.001);
  CHECK(spec.base.t_end == 3000.0);
  CHECK(spec.base.compatibility_defect() <= kCompatibilityTolerance);
  CHECK(spec.threads == 4);
}

}
