#include "cqed/ratelaser.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cqed/errors.hpp"

namespace cqed::ratelaser {

namespace {

constexpr double kDomainSlack = 1e-12;

void validate(const LaserRates& r) {
  if (!(r.R >= 0.0 && r.gamma >= 0.0 && r.kappa >= 0.0 && r.pump >= 0.0)) {
    throw ParameterError("rate-equation rates must be >= 0");
  }
}

struct Jacobian {
  double ii, in, ni, nn;
};

Jacobian jacobian(double inv, double n, const LaserRates& r) {
  return {-(r.R + r.gamma) - r.pump - 2.0 * r.R * n, -2.0 * r.R * inv,
          0.5 * r.R + r.R * n, r.R * inv - r.kappa};
}

bool is_stable(const Jacobian& j) {
  const double trace = j.ii + j.nn;
  const double det = j.ii * j.nn - j.in * j.ni;
  return trace < 0.0 && det > 0.0;
}

// Newton polish on rate_rhs = 0; keeps the original point if a step misbehaves.
void polish(double& inv, double& n, const LaserRates& r) {
  for (int it = 0; it < 3; ++it) {
    const auto f = rate_rhs(inv, n, r);
    const auto j = jacobian(inv, n, r);
    const double det = j.ii * j.nn - j.in * j.ni;
    if (det == 0.0 || !std::isfinite(det)) return;
    const double d_inv = (f.dI_dt * j.nn - f.dna_dt * j.in) / det;
    const double d_n = (j.ii * f.dna_dt - j.ni * f.dI_dt) / det;
    if (!std::isfinite(d_inv) || !std::isfinite(d_n)) return;
    inv -= d_inv;
    n -= d_n;
  }
}

std::optional<LaserSteadyState> admissible(double inv, const LaserRates& r) {
  if (!std::isfinite(inv) || inv < -1.0 - kDomainSlack || inv > 1.0 + kDomainSlack) return {};
  inv = std::clamp(inv, -1.0, 1.0);
  if (!(r.kappa - r.R * inv > 0.0)) return {};
  double n = na_of_inversion(inv, r.R, r.kappa);
  if (n < 0.0) return {};
  polish(inv, n, r);
  inv = std::clamp(inv, -1.0, 1.0);
  n = std::max(n, 0.0);
  return LaserSteadyState{inv, n, {}, steady_state_residual(inv, n, r)};
}

}  // namespace

RateDerivatives rate_rhs(double inversion, double n_a, const LaserRates& r) {
  return {-(r.R + r.gamma) * (1.0 + inversion) + r.pump * (1.0 - inversion) -
              2.0 * r.R * n_a * inversion,
          0.5 * r.R * (1.0 + inversion) + r.R * n_a * inversion - r.kappa * n_a};
}

double na_of_inversion(double inversion, double R, double kappa) {
  const double gap = kappa - R * inversion;
  if (!(gap > 0.0)) throw PoleDomain("gain reaches cavity loss: kappa - R*I <= 0");
  return 0.5 * R * (inversion + 1.0) / gap;
}

double steady_state_residual(double inversion, double n_a, const LaserRates& r) {
  const double inv_rel = (r.pump - (r.R + r.gamma)) / (r.R * (1.0 + 2.0 * n_a) + r.gamma + r.pump);
  const double gap = r.kappa - r.R * inversion;
  const double n_rel = 0.5 * r.R * (inversion + 1.0) / gap;
  const double e1 = std::abs(inversion - inv_rel) / std::max(1.0, std::abs(inversion));
  const double e2 = std::abs(n_a - n_rel) / std::max(1.0, std::abs(n_a));
  return std::max(e1, e2);
}

LaserSteadyState laser_steady_state(const LaserRates& r) {
  validate(r);
  if (r.kappa == 0.0) throw NoPhysicalRoot("no steady state without cavity loss");

  // Photon balance gives 2 kappa n_a = (P - gamma) - (P + gamma) I; inserting it
  // into n_a(I) leaves  qa I^2 + qb I + qc = 0.
  const double A = r.pump - r.gamma;
  const double B = r.pump + r.gamma;
  const double qa = B * r.R;
  const double qb = -(A * r.R + B * r.kappa + r.kappa * r.R);
  const double qc = r.kappa * (A - r.R);

  std::vector<double> roots;
  std::string kind;
  if (qa == 0.0) {
    if (qb == 0.0) throw NoPhysicalRoot("steady state is not isolated (R = P = gamma = 0)");
    roots.push_back(-qc / qb);
    kind = "linear";
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) throw NoPhysicalRoot("quadratic for the inversion has no real root");
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    roots.push_back(q / qa);
    if (q != 0.0) roots.push_back(qc / q);
  }

  std::vector<LaserSteadyState> ok;
  for (const double root : roots) {
    if (auto s = admissible(root, r)) ok.push_back(*s);
  }
  if (ok.empty()) throw NoPhysicalRoot("no root with I in [-1, 1] and n_a >= 0");
  if (ok.size() == 2 && std::abs(ok[0].inversion - ok[1].inversion) < 1e-12) ok.pop_back();
  if (ok.size() == 1) {
    ok[0].branch_info = kind.empty() ? "unique" : kind;
    return ok[0];
  }
  for (auto& s : ok) {
    if (is_stable(jacobian(s.inversion, s.n_a, r))) {
      s.branch_info = "stable-of-two";
      return s;
    }
  }
  ok[0].branch_info = "first-of-two";
  return ok[0];
}

}  // namespace cqed::ratelaser
