#include "cqed/analytics.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed::analytics {

namespace {

// Lorentzian transfer rate for total coherence width `width`.
double lorentzian_rate(double g, double width, double delta) {
  if (!(width > 0.0)) throw DivisionDomain("effective coupling needs a non-zero total width");
  const double x = 2.0 * delta / width;
  return 4.0 * g * g / width / (1.0 + x * x);
}

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0)) throw ParameterError(what);
}

}  // namespace

double effective_coupling(double g, double kappa, double gamma, double gamma_star, double delta) {
  require_non_negative(g, "g must be >= 0");
  require_non_negative(kappa, "kappa must be >= 0");
  require_non_negative(gamma, "gamma must be >= 0");
  require_non_negative(gamma_star, "gamma_star must be >= 0");
  return lorentzian_rate(g, kappa + gamma + gamma_star, delta);
}

double effective_coupling(const SystemParams& p) {
  return effective_coupling(p.g, p.kappa, p.gamma, p.gamma_star, p.delta);
}

DephasingOptimum optimal_dephasing(double g, double kappa, double gamma, double delta) {
  if (delta == 0.0) throw DivisionDomain("no finite dephasing optimum on resonance");
  if (delta < 0.0) throw ParameterError("optimal_dephasing expects delta > 0");
  const double opt = 2.0 * delta - kappa - gamma;
  if (opt > 0.0) return {opt, g * g / delta, true};
  return {0.0, effective_coupling(g, kappa, gamma, 0.0, delta), false};
}

double efficiency_beta(double R, double kappa, double gamma) {
  if (!(R > 0.0) || !(kappa > 0.0)) throw ParameterError("efficiency_beta needs R > 0 and kappa > 0");
  require_non_negative(gamma, "gamma must be >= 0");
  const double cavity_loss = R * kappa / (R + kappa);
  return cavity_loss / (gamma + cavity_loss);
}

double purcell_factor(double g, double kappa, double gamma, double gamma_star, double delta) {
  if (gamma == 0.0) throw DivisionDomain("Purcell factor undefined for gamma = 0");
  return effective_coupling(g, kappa, gamma, gamma_star, delta) / gamma;
}

double effective_quality_factor(double q_cav, double q_em) {
  if (!(q_cav > 0.0) || !(q_em > 0.0)) throw ParameterError("quality factors must be > 0");
  return 1.0 / (1.0 / q_cav + 1.0 / q_em);
}

PumpedRates pumped_rates(const SystemParams& p) {
  p.validate();
  const double Gamma = p.pump + p.gamma + p.gamma_star + p.kappa;
  return {Gamma, lorentzian_rate(p.g, Gamma, p.delta)};
}

BadCavityPopulations steady_populations_badcavity(const SystemParams& p) {
  const double R = pumped_rates(p).R_tilde;
  const double cavity_loss = (p.kappa + R) > 0.0 ? p.kappa * R / (p.kappa + R) : 0.0;
  const double denom = p.pump + p.gamma + cavity_loss;

  BadCavityPopulations out{};
  out.n_x = denom > 0.0 ? p.pump / denom : 0.0;
  out.n_a = (p.kappa + R) > 0.0 ? R / (p.kappa + R) * out.n_x : 0.0;
  out.N_rate = p.kappa * out.n_a;
  out.N_sat = cavity_loss;
  out.applicable = p.kappa > R;
  return out;
}

std::vector<TwoBoxState> two_box_evolve(double R, double kappa, double gamma,
                                        const TwoBoxState& initial,
                                        const std::vector<double>& t_grid) {
  require_non_negative(R, "R must be >= 0");
  require_non_negative(kappa, "kappa must be >= 0");
  require_non_negative(gamma, "gamma must be >= 0");

  // M = [[-(kappa + R), R], [R, -(gamma + R)]] acting on (n_a, n_x).
  // exp(M t) = e^{m t} [cosh(s t) I + sinh(s t)/s (M - m I)].
  const double d_a = -(kappa + R);
  const double d_x = -(gamma + R);
  const double m = 0.5 * (d_a + d_x);
  const double half_split = 0.5 * (d_a - d_x);
  const double s = std::hypot(half_split, R);

  std::vector<TwoBoxState> out;
  out.reserve(t_grid.size());
  for (const double t : t_grid) {
    // e^{mt} cosh(st) and e^{mt} sinh(st)/s from the two eigen-exponentials.
    const double fast = std::exp((m - s) * t);
    const double slow = std::exp((m + s) * t);
    const double ch = 0.5 * (slow + fast);
    double sh_over_s = t * std::exp(m * t);
    if (s * t > 0.5) {
      sh_over_s = 0.5 * (slow - fast) / s;
    } else if (s > 0.0) {
      sh_over_s = 0.5 * fast * std::expm1(2.0 * s * t) / s;
    }
    const double aa = ch + sh_over_s * half_split;
    const double xx = ch - sh_over_s * half_split;
    const double ax = sh_over_s * R;
    out.push_back({aa * initial.n_a + ax * initial.n_x, ax * initial.n_a + xx * initial.n_x});
  }
  return out;
}

RegimeReport classify_regime(const SystemParams& p) {
  p.validate();
  const double R = p.pump > 0.0 ? pumped_rates(p).R_tilde : effective_coupling(p);
  const double width = p.kappa + p.gamma + p.gamma_star;

  RegimeReport r;
  r.good_cavity = R > p.kappa;
  r.strong_coupling = 2.0 * p.g > std::abs(p.gamma + p.gamma_star - p.kappa);
  r.coherent = 2.0 * p.g > width;
  r.purcell = R < kPurcellFraction * p.kappa;
  r.adiabatic_valid = !r.coherent || std::abs(p.delta) > p.g;
  return r;
}

}  // namespace cqed::analytics
