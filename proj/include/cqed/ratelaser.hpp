#pragma once

// Semiclassical rate equations of the incoherently pumped single-emitter
// laser, with <a^dag a sigma_z> factorized into <a^dag a><sigma_z>. R is taken
// as a fixed input; callers choose between the bare and pump-broadened value.

#include <string>

namespace cqed::ratelaser {

struct LaserRates {
  double R = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
  double pump = 0.0;
};

struct RateDerivatives {
  double dI_dt;
  double dna_dt;
};

/// dI/dt  = -(R + gamma)(1 + I) + P (1 - I) - 2 R n_a I
/// dn_a/dt = (R/2)(1 + I) + R n_a I - kappa n_a
RateDerivatives rate_rhs(double inversion, double n_a, const LaserRates& rates);

/// n_a = R (I + 1) / (2 (kappa - R I)). Throws PoleDomain when kappa - R I <= 0.
double na_of_inversion(double inversion, double R, double kappa);

struct LaserSteadyState {
  double inversion;
  double n_a;
  /// "unique", "linear" (pump = gamma = 0 or R = 0), "stable-of-two" or "first-of-two".
  std::string branch_info;
  /// max relative residual of the two steady-state relations.
  double residual;
};

/// Steady-state pair; the stationary condition reduces to a quadratic in I.
/// Throws NoPhysicalRoot when no root has I in [-1, 1], n_a >= 0 and
/// kappa - R I > 0 (e.g. kappa = 0).
LaserSteadyState laser_steady_state(const LaserRates& rates);

/// max of |I - I(n_a)| / max(1, |I|) and |n_a - n_a(I)| / max(1, n_a).
double steady_state_residual(double inversion, double n_a, const LaserRates& rates);

}  // namespace cqed::ratelaser
