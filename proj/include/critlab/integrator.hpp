#pragma once

// The self-tuning neural integrator
//   x'  = (mu - mu0) x + u(t)
//   mu' = f(x) - g(mu)
// driven by saccades that reset x to a desired level, together with the
// energy certificate in the coordinates q = ln(x / x*), p = mu - mu0.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "critlab/adaptation.hpp"
#include "critlab/dynamics.hpp"

namespace critlab {

struct IntegratorParams {
  double mu0 = 200.0;     // natural decay rate, s^-1
  double x_init = 20.0;   // Hz
  double mu_init = 198.0; // s^-1

  void check() const;
};

// Saccade i happens at t_first + i * period and sets x to levels[i % n].
struct SaccadeSchedule {
  double period = 1.0;
  std::vector<double> levels{20.0, 60.0};
  double t_first = 0.0;

  void check() const;
  [[nodiscard]] double level(std::size_t i) const { return levels[i % levels.size()]; }
  // Duration of one full pass through the levels.
  [[nodiscard]] double cycle() const { return period * static_cast<double>(levels.size()); }
  // Time-weighted mean of the desired levels (equal dwell per level).
  [[nodiscard]] double mean_level() const;
  // Saccade times that fall on the grid.
  [[nodiscard]] std::vector<double> times(const TimeGrid& grid) const;
};

using WarningSink = std::function<void(const std::string&)>;

struct SimulationOptions {
  std::size_t record_stride = 1;
  WarningSink on_warning;  // gain left its validation domain, etc.
};

// min(1 ms, 0.01 / mu0).
double default_step(double mu0);

Trajectory simulate_autonomous(const IntegratorParams& params, const AdaptationLaw& law, const TimeGrid& grid,
                               const SimulationOptions& options = {});

Trajectory simulate_driven(const IntegratorParams& params, const AdaptationLaw& law,
                           const SaccadeSchedule& schedule, const TimeGrid& grid,
                           const SimulationOptions& options = {});

struct EnergyState {
  double q = 0.0;  // ln(x / x*)
  double p = 0.0;  // mu - mu0
  double V = 0.0;  // p^2 / 2 + U(q)
};

// V(x, mu) = (mu - mu0)^2 / 2 + U(ln(x / x*)),  U(q) = -int_0^q [f(e^s x*) - g(mu0)] ds.
// Affine laws use the closed-form potential, other laws Gauss-Kronrod quadrature.
class EnergyFunction {
 public:
  EnergyFunction(const AdaptationLaw& law, double mu0);

  [[nodiscard]] EnergyState operator()(double x, double mu) const;
  [[nodiscard]] double potential(double q) const;
  [[nodiscard]] double x_star() const noexcept { return x_star_; }

 private:
  const AdaptationLaw* law_;
  double mu0_;
  double x_star_;
  double g0_;
};

EnergyState energy(double x, double mu, const AdaptationLaw& law, double mu0);

struct EnergyReport {
  bool passed = true;
  double max_increment = 0.0;   // largest V(t_{k+1}) - V(t_k), may be negative
  double max_excess = 0.0;      // largest increment minus its slack
  double at_time = 0.0;         // where max_excess occurred
  std::size_t violations = 0;
  std::vector<double> t;
  std::vector<EnergyState> values;
};

inline constexpr double kDefaultEnergySlack = 1e-6;

// Energy along an autonomous trajectory; passes when every consecutive
// increment is <= kappa * dt_k^2. ProtocolError if the trajectory has jumps.
EnergyReport check_energy_decrease(const Trajectory& traj, const AdaptationLaw& law, double mu0,
                                   double kappa = kDefaultEnergySlack);

void write_energy_csv(std::ostream& out, const EnergyReport& report);

// Number of separate rest-point clusters of the coupled vector field found by
// sign changes over an n x n grid on domain_x x domain_mu.
std::size_t count_rest_points(const AdaptationLaw& law, double mu0, std::size_t n = 200);

}  // namespace critlab
