#pragma once

// One-parameter robustness sweeps of the saccade-driven integrator with an
// affine adaptation law.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "critlab/adaptation.hpp"
#include "critlab/averaging.hpp"
#include "critlab/integrator.hpp"

namespace critlab {

enum class SweepParameter { A, B, C, Mu0 };

std::string to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);

// Everything needed for one saccade-driven run.
struct DrivenConfig {
  IntegratorParams integrator;
  AffineLawParams law;
  SaccadeSchedule schedule;
  double t_end = 3000.0;
  double dt = 0.0;                   // 0: default_step(mu0)
  std::size_t record_stride = 0;     // 0: one sample per ~10 ms
  Interval domain_x = kDefaultRateDomain;
  std::optional<Interval> domain_mu;  // default [0, 2 mu0]

  [[nodiscard]] double step() const;
  [[nodiscard]] std::size_t stride() const;
  [[nodiscard]] AdaptationLaw make_law() const;
  [[nodiscard]] TimeGrid grid() const;
  // |a * mean_level + b * mu0 - c| / |c|
  [[nodiscard]] double compatibility_defect() const;
};

Trajectory run_driven(const DrivenConfig& config, const SimulationOptions& options = {});

// Copy of `base` with one parameter scaled. Scaling mu0 shifts mu_init by the
// same amount so the initial mis-tuning is preserved.
DrivenConfig perturb(const DrivenConfig& base, SweepParameter param, double multiplier);

struct SweepSpec {
  DrivenConfig base;
  SweepParameter param = SweepParameter::C;
  std::vector<double> multipliers;  // identity is added if absent
  std::size_t replicates = 1;
  double replicate_spacing = 1.0;   // s^-1 between replicate initial gains
  std::size_t threads = 1;
};

// n points log-uniform in [lo, hi]; with odd n the middle point is exactly 1
// when lo * hi == 1.
std::vector<double> log_uniform_grid(double lo, double hi, std::size_t n);

inline constexpr double kCompatibilityTolerance = 1e-9;
inline constexpr double kGainTolerance = 0.1;  // s^-1

struct SweepRow {
  double multiplier = 1.0;
  double value = 0.0;               // absolute parameter value
  double mean_mu_minus_mu0 = 0.0;   // periodic-regime mean, s^-1
  double mu0 = 0.0;
  double guard_drift = 0.0;
  bool flagged = false;
  std::string flag;                 // reason when flagged
};

struct SweepResult {
  SweepParameter param = SweepParameter::C;
  double nominal_mu0 = 0.0;
  std::vector<SweepRow> rows;       // ordered by multiplier
};

// Violated compatibility precondition of a sweep's nominal configuration.
class CompatibilityError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "compatibility"; }
};

// Runs every grid point (concurrently when threads > 1). Failed or unsettled
// runs are flagged and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec);

// Evaluates a single grid point; exposed for targeted checks.
SweepRow run_sweep_point(const SweepSpec& spec, double multiplier);

struct RobustnessEstimate {
  double factor = 0.0;                   // tolerable / (threshold / mu0)
  double tolerable_perturbation = 0.0;   // relative, smaller of the two sides found
  std::optional<double> lower_multiplier;  // where |mean| crosses threshold below 1
  std::optional<double> upper_multiplier;  // and above 1
};

// Interpolates the sweep to the |mean(mu - mu0)| = threshold contour on either
// side of the identity multiplier. InsufficientRangeError when neither side
// is bracketed.
RobustnessEstimate robustness_factor(const SweepResult& result, double mu0, double threshold = kGainTolerance);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace critlab
