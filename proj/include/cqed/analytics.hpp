#pragma once

// Closed-form results of the adiabatically eliminated (incoherent) model:
// effective coupling, Purcell factor, source efficiency, pump-broadened rates,
// bad-cavity steady state and the two-box population dynamics.

#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed::analytics {

/// R = [4g^2 / W] / [1 + (2 delta / W)^2] with W = kappa + gamma + gamma_star.
/// Throws DivisionDomain when W = 0.
double effective_coupling(double g, double kappa, double gamma, double gamma_star, double delta);
double effective_coupling(const SystemParams& p);

struct DephasingOptimum {
  double gamma_star_opt;  // 0 when the optimum cannot be reached by adding dephasing
  double r_max;
  bool reachable;
};

/// The dephasing that maximizes R at fixed detuning: kappa + gamma + gamma* = 2 delta,
/// where R = g^2 / delta. Throws DivisionDomain for delta = 0 (R peaks at gamma* = 0).
DephasingOptimum optimal_dephasing(double g, double kappa, double gamma, double delta);

/// Fraction of emitted photons that leave through the cavity.
double efficiency_beta(double R, double kappa, double gamma);

/// F* = R / gamma. Throws DivisionDomain for gamma = 0.
double purcell_factor(double g, double kappa, double gamma, double gamma_star, double delta);

/// 1/Q_eff = 1/Q_cav + 1/Q_em.
double effective_quality_factor(double q_cav, double q_em);

struct PumpedRates {
  double Gamma;    // P_x + gamma + gamma_star + kappa
  double R_tilde;  // effective coupling with Gamma as the total width
};

PumpedRates pumped_rates(const SystemParams& p);

struct BadCavityPopulations {
  double n_x;
  double n_a;
  double N_rate;  // kappa n_a
  double N_sat;   // kappa R~ / (kappa + R~)
  bool applicable;  // kappa > R~
};

/// Steady state restricted to {|g,0>, |g,1>, |e,0>} (valid in the bad cavity).
BadCavityPopulations steady_populations_badcavity(const SystemParams& p);

struct TwoBoxState {
  double n_a = 0.0;
  double n_x = 0.0;
};

/// Exact solution of
///   dn_a/dt = -(kappa + R) n_a + R n_x,   dn_x/dt = -(gamma + R) n_x + R n_a
/// on each grid time (the generator is symmetric, so the exponential is closed form).
std::vector<TwoBoxState> two_box_evolve(double R, double kappa, double gamma,
                                        const TwoBoxState& initial,
                                        const std::vector<double>& t_grid);

struct RegimeReport {
  bool good_cavity = false;      // R > kappa
  bool strong_coupling = false;  // 2g > |gamma + gamma* - kappa|
  bool coherent = false;         // 2g > kappa + gamma + gamma*
  bool purcell = false;          // R < 0.1 kappa
  bool adiabatic_valid = false;  // incoherent, or |delta| > g

  bool operator==(const RegimeReport&) const = default;
};

/// R < kPurcellFraction * kappa flags the Purcell regime.
inline constexpr double kPurcellFraction = 0.1;

/// Uses the pump-broadened R~ whenever pump > 0.
RegimeReport classify_regime(const SystemParams& p);

}  // namespace cqed::analytics
