#pragma once

// Self-tuned hair-cell oscillator
//   x'' + (mu0 - mu) x' + lambda x'^3 + omega^2 x = 0,   mu' = f(r) - g(mu),
// with amplitude r^2 = x^2 + (x'/omega)^2.

#include <cmath>
#include <cstddef>
#include <vector>

#include "critlab/adaptation.hpp"
#include "critlab/dynamics.hpp"

namespace critlab {

struct OscillatorParams {
  double mu0 = 1.0;
  double lambda = 1.0;
  double omega = 1.0;
  double x_init = 0.1;
  double xdot_init = 0.0;
  double mu_init = 0.2;

  void check() const;
};

struct AmplitudeSample {
  double t = 0.0;
  double r = 0.0;
};

inline double amplitude(double x, double xdot, double omega) {
  const double v = xdot / omega;
  return std::sqrt(x * x + v * v);
}

// Columns x, xdot, mu and the derived amplitude r. A frozen law holds mu at
// mu_init.
Trajectory simulate_oscillator(const OscillatorParams& params, const AdaptationLaw& law, const TimeGrid& grid,
                               std::size_t record_stride = 1);

std::vector<AmplitudeSample> amplitude_samples(const Trajectory& traj);

// Largest r in each consecutive window of length `span` starting at the
// first sample; incomplete trailing windows are dropped.
std::vector<double> amplitude_envelope(const Trajectory& traj, double span);

enum class BalanceRegime {
  Oscillating,  // r_inf > 0
  Critical,     // balance at r = 0 with mu = mu0
  Subcritical,  // f(0) < g(mu0): oscillation dies, gain settles below mu0
};

struct BalancePrediction {
  double r_infinity = 0.0;
  double mu_infinity = 0.0;
  BalanceRegime regime = BalanceRegime::Oscillating;
};

inline constexpr double kDefaultBalanceRmax = 100.0;

// First-harmonic averaged equilibrium
//   mu - mu0 = (3/4) lambda omega^2 r^2,   f(r) = g(mu)
// solved by bisection in s = r^2 on (0, r_max^2]. RangeError when the balance
// lies beyond r_max.
BalancePrediction harmonic_balance_prediction(const OscillatorParams& params, const AdaptationLaw& law,
                                              double r_max = kDefaultBalanceRmax);

}  // namespace critlab
