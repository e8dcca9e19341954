#pragma once

// Flat `key = value` run configuration with dotted namespaces and `#`
// comments, plus builders that turn it into model objects.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "critlab/adaptation.hpp"
#include "critlab/integrator.hpp"
#include "critlab/oscillator.hpp"
#include "critlab/sweep.hpp"

namespace critlab {

inline constexpr const char* kSchemaTag = "critlab-config/1";

class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig parse(std::istream& in, const std::string& origin = "<config>");
  static RunConfig parse_string(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  // Sorted `key = value` lines; parse(serialize()) reproduces the map.
  [[nodiscard]] std::string serialize() const;

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] std::string get_string(const std::string& key) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::size_t get_count(const std::string& key, std::size_t fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::vector<double> get_list(const std::string& key) const;

  // ConfigError naming the first key not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  // Directory that relative file references resolve against.
  [[nodiscard]] const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
  void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

  friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.values_ == b.values_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_ = ".";
};

enum class LawContext { Integrator, Oscillator };

// Keys accepted by each config flavour.
const std::set<std::string>& integrator_keys();
const std::set<std::string>& oscillator_keys();
const std::set<std::string>& sweep_spec_keys();

// `law = affine | table | lorentzian` with its parameters and domains. `mu0`
// sets the default gain domain [0, 2 mu0].
AdaptationLaw build_law(const RunConfig& cfg, double mu0, LawContext context);

struct IntegratorRun {
  IntegratorParams params;
  std::optional<SaccadeSchedule> schedule;  // absent: autonomous run
  TimeGrid grid;
  std::size_t record_stride = 1;
  double energy_kappa = kDefaultEnergySlack;
};
IntegratorRun build_integrator_run(const RunConfig& cfg);

struct OscillatorRun {
  OscillatorParams params;
  bool frozen = false;
  double r_max = kDefaultBalanceRmax;
  TimeGrid grid;
  std::size_t record_stride = 1;
};
OscillatorRun build_oscillator_run(const RunConfig& cfg);

// Affine driven configuration for sweeps.
DrivenConfig build_driven_config(const RunConfig& cfg);

// Sweep spec file; `base` is resolved relative to the spec's directory.
SweepSpec build_sweep_spec(const RunConfig& spec);

}  // namespace critlab
