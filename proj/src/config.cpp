#include "critlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "critlab/csv.hpp"
#include "critlab/errors.hpp"

namespace critlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
  });
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (cfg.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  if (cfg.has("schema") && cfg.values_.at("schema") != kSchemaTag) {
    throw ConfigError(origin + ": unsupported schema '" + cfg.values_.at("schema") + "' (expected " +
                      kSchemaTag + ")");
  }
  return cfg;
}

RunConfig RunConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  RunConfig cfg = parse(in, path.string());
  cfg.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return cfg;
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  if (value.find_first_of("#\n") != std::string::npos || trim(value) != value) {
    throw ConfigError("value for '" + key + "' cannot be represented in a config file");
  }
  values_[key] = value;
}

std::string RunConfig::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key) const {
  double v = 0.0;
  const std::string text = get_string(key);
  if (!parse_number(text, v)) throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
  return v;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::size_t RunConfig::get_count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const double v = get_double(key);
  if (v < 0.0 || v != std::floor(v) || v > 1e15) {
    throw ConfigError("key '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("key '" + key + "' must be true or false");
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::string text = get_string(key);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  std::string item;
  while (in >> item) {
    double v = 0.0;
    if (!parse_number(item, v)) throw ConfigError("key '" + key + "': '" + item + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
  return out;
}

void RunConfig::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "'");
  }
}

namespace {

const std::set<std::string> kLawKeys = {
    "law",          "law.a",      "law.b",     "law.c",      "law.eps",    "law.f_table", "law.g_table",
    "law.height",   "law.width",  "law.slope", "law.offset", "law.x_min",  "law.x_max",   "law.mu_min",
    "law.mu_max",
};

std::set<std::string> with_law_keys(std::initializer_list<std::string> keys) {
  std::set<std::string> s(keys);
  s.insert(kLawKeys.begin(), kLawKeys.end());
  return s;
}

}  // namespace

const std::set<std::string>& integrator_keys() {
  static const std::set<std::string> keys = with_law_keys({
      "schema", "mu0", "x_init", "mu_init", "saccade.period", "saccade.levels", "saccade.t_first", "t_end", "dt",
      "record_stride", "energy.kappa", "compat.threshold", "compat.bins",
  });
  return keys;
}

const std::set<std::string>& oscillator_keys() {
  static const std::set<std::string> keys = with_law_keys({
      "schema", "oscillator.mu0", "oscillator.lambda", "oscillator.omega", "oscillator.x_init",
      "oscillator.xdot_init", "oscillator.mu_init", "oscillator.freeze", "oscillator.r_max", "t_end", "dt",
      "record_stride",
  });
  return keys;
}

const std::set<std::string>& sweep_spec_keys() {
  static const std::set<std::string> keys = {
      "schema",    "base", "param", "multipliers", "grid.lo", "grid.hi", "grid.points", "replicates",
      "replicate_spacing", "t_end", "dt", "threads",
  };
  return keys;
}

namespace {

Interval law_x_domain(const RunConfig& cfg, LawContext ctx) {
  const double default_hi = ctx == LawContext::Integrator ? kDefaultRateDomain.hi : kDefaultBalanceRmax;
  Interval d;
  d.hi = cfg.get_double("law.x_max", default_hi);
  if (cfg.has("law.x_min")) {
    d.lo = cfg.get_double("law.x_min");
    d.lo_open = false;
  } else {
    d.lo = 0.0;
    d.lo_open = ctx == LawContext::Integrator;
  }
  if (!(d.hi > d.lo)) throw ConfigError("law.x_max must exceed law.x_min");
  return d;
}

Interval law_mu_domain(const RunConfig& cfg, double mu0) {
  const Interval def = default_gain_domain(mu0);
  Interval d{cfg.get_double("law.mu_min", def.lo), cfg.get_double("law.mu_max", def.hi), false};
  if (!(d.hi > d.lo)) throw ConfigError("law.mu_max must exceed law.mu_min");
  return d;
}

std::string resolve(const RunConfig& cfg, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() ? p.string() : (cfg.base_dir() / p).string();
}

}  // namespace

AdaptationLaw build_law(const RunConfig& cfg, double mu0, LawContext context) {
  const std::string kind = cfg.get_string("law", "affine");
  if (kind == "affine") {
    AffineLawParams p{cfg.get_double("law.a"), cfg.get_double("law.b"), cfg.get_double("law.c"),
                      cfg.get_double("law.eps")};
    return AdaptationLaw::affine(p, law_x_domain(cfg, context), law_mu_domain(cfg, mu0));
  }
  if (kind == "lorentzian") {
    LorentzianLawParams p{cfg.get_double("law.height"), cfg.get_double("law.width"), cfg.get_double("law.slope"),
                          cfg.get_double("law.offset")};
    return AdaptationLaw::lorentzian(p, law_x_domain(cfg, context), law_mu_domain(cfg, mu0));
  }
  if (kind == "table") {
    AdaptationLaw law = AdaptationLaw::table(read_two_column_csv(resolve(cfg, cfg.get_string("law.f_table"))),
                                             read_two_column_csv(resolve(cfg, cfg.get_string("law.g_table"))));
    if (cfg.has("law.x_min") || cfg.has("law.x_max") || cfg.has("law.mu_min") || cfg.has("law.mu_max")) {
      Interval dx = law.domain_x();
      Interval dm = law.domain_mu();
      dx.lo = cfg.get_double("law.x_min", dx.lo);
      dx.hi = cfg.get_double("law.x_max", dx.hi);
      dm.lo = cfg.get_double("law.mu_min", dm.lo);
      dm.hi = cfg.get_double("law.mu_max", dm.hi);
      law = law.with_domains(dx, dm);
    }
    return law;
  }
  throw ConfigError("law must be one of affine, table, lorentzian (got '" + kind + "')");
}

IntegratorRun build_integrator_run(const RunConfig& cfg) {
  cfg.reject_unknown(integrator_keys());
  IntegratorRun run;
  run.params.mu0 = cfg.get_double("mu0");
  if (cfg.has("saccade.levels")) {
    SaccadeSchedule s;
    s.levels = cfg.get_list("saccade.levels");
    s.period = cfg.get_double("saccade.period", s.period);
    s.t_first = cfg.get_double("saccade.t_first", s.t_first);
    s.check();
    run.schedule = s;
    run.params.x_init = cfg.get_double("x_init", s.levels.front());
  } else {
    run.params.x_init = cfg.get_double("x_init");
  }
  run.params.mu_init = cfg.get_double("mu_init", run.params.mu0 - 2.0);
  run.params.check();
  run.grid = TimeGrid::make(0.0, cfg.get_double("t_end"), cfg.get_double("dt", default_step(run.params.mu0)));
  run.record_stride = std::max<std::size_t>(1, cfg.get_count("record_stride", 1));
  run.energy_kappa = cfg.get_double("energy.kappa", kDefaultEnergySlack);
  return run;
}

OscillatorRun build_oscillator_run(const RunConfig& cfg) {
  cfg.reject_unknown(oscillator_keys());
  OscillatorRun run;
  auto& p = run.params;
  p.mu0 = cfg.get_double("oscillator.mu0", p.mu0);
  p.lambda = cfg.get_double("oscillator.lambda", p.lambda);
  p.omega = cfg.get_double("oscillator.omega", p.omega);
  p.x_init = cfg.get_double("oscillator.x_init", p.x_init);
  p.xdot_init = cfg.get_double("oscillator.xdot_init", p.xdot_init);
  p.mu_init = cfg.get_double("oscillator.mu_init", p.mu_init);
  p.check();
  run.frozen = cfg.get_bool("oscillator.freeze", false);
  run.r_max = cfg.get_double("oscillator.r_max", kDefaultBalanceRmax);
  run.grid = TimeGrid::make(0.0, cfg.get_double("t_end", 2000.0), cfg.get_double("dt", 0.01));
  run.record_stride = std::max<std::size_t>(1, cfg.get_count("record_stride", 1));
  return run;
}

DrivenConfig build_driven_config(const RunConfig& cfg) {
  const IntegratorRun run = build_integrator_run(cfg);
  if (!run.schedule) throw ConfigError("sweep base config needs a saccade schedule (saccade.levels)");
  if (cfg.get_string("law", "affine") != "affine") throw ConfigError("sweeps need law = affine");
  DrivenConfig d;
  d.integrator = run.params;
  d.schedule = *run.schedule;
  d.law = AffineLawParams{cfg.get_double("law.a"), cfg.get_double("law.b"), cfg.get_double("law.c"),
                          cfg.get_double("law.eps")};
  d.t_end = run.grid.t_end;
  d.dt = cfg.has("dt") ? run.grid.dt : 0.0;
  d.record_stride = cfg.get_count("record_stride", 0);
  d.domain_x = law_x_domain(cfg, LawContext::Integrator);
  if (cfg.has("law.mu_min") || cfg.has("law.mu_max")) d.domain_mu = law_mu_domain(cfg, d.integrator.mu0);
  return d;
}

SweepSpec build_sweep_spec(const RunConfig& spec) {
  spec.reject_unknown(sweep_spec_keys());
  const RunConfig base = RunConfig::load(resolve(spec, spec.get_string("base")));
  SweepSpec s;
  s.base = build_driven_config(base);
  s.param = parse_sweep_parameter(spec.get_string("param"));
  if (spec.has("multipliers")) {
    s.multipliers = spec.get_list("multipliers");
  } else {
    s.multipliers = log_uniform_grid(spec.get_double("grid.lo", 0.8), spec.get_double("grid.hi", 1.25),
                                     spec.get_count("grid.points", 21));
  }
  s.replicates = std::max<std::size_t>(1, spec.get_count("replicates", 1));
  s.replicate_spacing = spec.get_double("replicate_spacing", 1.0);
  if (spec.has("t_end")) s.base.t_end = spec.get_double("t_end");
  if (spec.has("dt")) s.base.dt = spec.get_double("dt");
  s.threads = std::max<std::size_t>(1, spec.get_count("threads", 1));
  return s;
}

}  // namespace critlab
