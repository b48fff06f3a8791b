#include <cmath>
#include <random>

#include "doctest.h"

#include "cqed/analytics.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/observables.hpp"
#include "oracles.hpp"

using namespace cqed;
using namespace cqed::analytics;
using doctest::Approx;

TEST_CASE("effective coupling values") {
  CHECK(effective_coupling(1, 5, 0.01, 0, 0) == Approx(4.0 / 5.01).epsilon(1e-14));
  CHECK(effective_coupling(1, 5, 0.01, 0, 10) == Approx(0.04714).epsilon(1e-4));
  CHECK(effective_coupling(1, 5, 0.01, 20, 10) == Approx(0.09756).epsilon(1e-4));
  CHECK(effective_coupling(1, 5, 0.01, 3, 4) == effective_coupling(1, 5, 0.01, 3, -4));
  CHECK(effective_coupling(1, 5, 0.01, 3, 4) > 0.0);
  CHECK_THROWS_AS(effective_coupling(1, 0, 0, 0, 1), DivisionDomain);
  CHECK_THROWS_AS(effective_coupling(1, -1, 0, 0, 1), ParameterError);

  double previous = effective_coupling(1, 5, 0.01, 0, 10);
  for (double delta = 11; delta < 1000; delta *= 1.3) {
    const double r = effective_coupling(1, 5, 0.01, 0, delta);
    CHECK(r < previous);
    previous = r;
  }
  CHECK(previous < 1e-4);
}

TEST_CASE("dephasing optimum") {
  const auto opt = optimal_dephasing(1, 5, 0.01, 10);
  CHECK(opt.reachable);
  CHECK(opt.gamma_star_opt == Approx(14.99).epsilon(1e-12));
  CHECK(opt.r_max == Approx(0.1).epsilon(1e-14));
  CHECK(std::abs(effective_coupling(1, 5, 0.01, opt.gamma_star_opt, 10) - opt.r_max) < 1e-12);

  const auto blocked = optimal_dephasing(1, 5, 0.01, 2);
  CHECK_FALSE(blocked.reachable);
  CHECK(blocked.gamma_star_opt == 0.0);
  CHECK_THROWS_AS(optimal_dephasing(1, 5, 0.01, 0), DivisionDomain);
}

TEST_CASE("coupling is unimodal in dephasing") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double kappa = 0.1 + 5 * u(rng), gamma = 0.1 * u(rng), g = 0.2 + u(rng);
    const double delta = kappa + gamma + 0.1 + 10 * u(rng);
    const double peak = 2 * delta - kappa - gamma;

    // On resonance R only falls.
    CHECK(effective_coupling(g, kappa, gamma, 1.0, 0) < effective_coupling(g, kappa, gamma, 0.5, 0));

    for (double f : {0.1, 0.5, 0.9}) {
      CHECK(effective_coupling(g, kappa, gamma, f * peak, delta) <
            effective_coupling(g, kappa, gamma, (f + 0.05) * peak, delta));
      CHECK(effective_coupling(g, kappa, gamma, (1.0 + f) * peak, delta) <
            effective_coupling(g, kappa, gamma, (0.95 + f) * peak, delta));
    }
    // Golden-section search for the maximum.
    double lo = 0.0, hi = 4 * peak;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    while (hi - lo > 1e-7) {
      const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
      if (effective_coupling(g, kappa, gamma, a, delta) > effective_coupling(g, kappa, gamma, b, delta))
        hi = b;
      else
        lo = a;
    }
    CHECK(std::abs(0.5 * (lo + hi) - peak) < 1e-6 * std::max(1.0, peak));
  }
}

TEST_CASE("efficiency") {
  CHECK(efficiency_beta(0.3, 5, 0.0) == 1.0);
  CHECK(efficiency_beta(0.09756, 5, 0.01) == Approx(0.9054).epsilon(1e-4));
  CHECK(efficiency_beta(1e9, 5, 0.01) == Approx(5.0 / 5.01).epsilon(1e-8));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double R = 0.01 + 5 * u(rng), kappa = 0.01 + 5 * u(rng), gamma = 0.01 + u(rng);
    const double beta = efficiency_beta(R, kappa, gamma);
    CHECK(beta > 0.0);
    CHECK(beta <= 1.0);
    const double h = 1e-6;
    const double fd = (efficiency_beta(R + h, kappa, gamma) - efficiency_beta(R - h, kappa, gamma)) / (2 * h);
    const double cavity_loss = R * kappa / (R + kappa);
    const double exact = gamma * kappa * kappa / ((R + kappa) * (R + kappa)) /
                         ((gamma + cavity_loss) * (gamma + cavity_loss));
    CHECK(fd > 0.0);
    CHECK(std::abs(fd / exact - 1.0) < 1e-4);
  }
  CHECK_THROWS_AS(efficiency_beta(0.0, 5, 0.01), ParameterError);
}

TEST_CASE("Purcell factor and quality factor") {
  CHECK(purcell_factor(1, 5, 0.01, 0, 0) == Approx(79.84).epsilon(1e-4));
  CHECK(purcell_factor(1, 1e6, 1e-3, 0, 0) == Approx(4.0 / (1e6 * 1e-3)).epsilon(1e-8));
  const auto opt = optimal_dephasing(1, 5, 0.01, 10);
  CHECK(purcell_factor(1, 5, 0.01, opt.gamma_star_opt, 10) == Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(purcell_factor(1, 5, 0, 0, 0), DivisionDomain);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double g = u(rng) + 0.1, kappa = 5 * u(rng) + 0.01, gamma = u(rng) + 0.01,
                 gs = 10 * u(rng), delta = 10 * u(rng) - 5;
    CHECK(std::abs(purcell_factor(g, kappa, gamma, gs, delta) * gamma -
                   effective_coupling(g, kappa, gamma, gs, delta)) < 1e-12);
  }

  CHECK(effective_quality_factor(5000, 5000) == Approx(2500));
  CHECK(effective_quality_factor(5000, 1000) == Approx(833.3333333).epsilon(1e-9));
  CHECK(effective_quality_factor(5000, 1e300) == Approx(5000));
}

TEST_CASE("pump-broadened rates") {
  SystemParams p{1.0, 0.2, 0.01, 0.0, 0.0, 0.0, 1};
  CHECK(pumped_rates(p).R_tilde == effective_coupling(p));
  p.pump = 20.0;
  const auto r = pumped_rates(p);
  CHECK(r.Gamma == Approx(20.21));
  CHECK(r.R_tilde == Approx(4.0 / 20.21).epsilon(1e-14));
  CHECK(r.R_tilde == Approx(0.19792).epsilon(1e-4));

  SystemParams half = p;
  half.delta = r.Gamma / 2.0;
  CHECK(pumped_rates(half).R_tilde == Approx(0.5 * r.R_tilde).epsilon(1e-14));
}

TEST_CASE("bad-cavity populations") {
  SystemParams p{1.0, 5.0, 0.01, 0.0, 0.0, 0.0, 3};
  const double R = effective_coupling(p);

  p.pump = 1e-4 * p.gamma;
  const auto low = steady_populations_badcavity(p);
  CHECK(std::abs(low.N_rate / p.pump / efficiency_beta(R, p.kappa, p.gamma) - 1.0) < 0.01);
  CHECK(low.applicable);

  p.pump = 1e8;
  const auto high = steady_populations_badcavity(p);
  CHECK(high.n_x == Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(high.N_rate / high.N_sat - 1.0) < 1e-6);

  // Rises with the pump until broadening of R~ takes over, then falls.
  double previous = 0.0;
  double peak_pump = 0.0;
  for (double pump = 1e-4; pump < 1e4; pump *= 1.5) {
    p.pump = pump;
    const auto pops = steady_populations_badcavity(p);
    CHECK(pops.N_rate <= pops.N_sat * (1 + 1e-12));
    if (pump < 0.1 * (p.kappa + p.gamma)) {
      CHECK(pops.N_rate > previous);
      SystemParams q = p;
      q.pump = pump * (1.0 + 1e-6);
      CHECK(steady_populations_badcavity(q).N_rate > pops.N_rate);
    }
    if (pops.N_rate > previous) peak_pump = pump;
    previous = pops.N_rate;
  }
  CHECK(peak_pump > 0.1 * (p.kappa + p.gamma));
  CHECK(peak_pump < 1e3);

  p.pump = 0.01;
  const auto pops = steady_populations_badcavity(p);
  const auto me = observe(solve_steady_state(p, SteadySolver::dense).rho, p);
  CHECK(std::abs(pops.n_x / me.n_x - 1.0) < 0.02);
  CHECK(std::abs(pops.n_a / me.n_a - 1.0) < 0.02);
  const auto ref = oracle::bad_cavity(p);
  CHECK(pops.n_x == Approx(ref.n_x).epsilon(1e-14));
  CHECK(pops.n_a == Approx(ref.n_a).epsilon(1e-14));
}

TEST_CASE("two-box model") {
  std::vector<double> t;
  for (int k = 0; k <= 100; ++k) t.push_back(0.2 * k);

  const auto free = two_box_evolve(0.0, 2.0, 0.3, {0.4, 0.9}, t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(free[k].n_a == Approx(0.4 * std::exp(-2.0 * t[k])).epsilon(1e-13));
    CHECK(free[k].n_x == Approx(0.9 * std::exp(-0.3 * t[k])).epsilon(1e-13));
  }

  // kappa >> R: n_x relaxes at gamma + R up to O(R/kappa).
  const double R = 0.05, kappa = 50.0, gamma = 0.01;
  const auto purcell = two_box_evolve(R, kappa, gamma, {0.0, 1.0}, {10.0, 20.0});
  const double rate = std::log(purcell[0].n_x / purcell[1].n_x) / 10.0;
  CHECK(std::abs(rate - (gamma + R)) < 2.0 * R * R / kappa);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto traj = two_box_evolve(3 * u(rng), 3 * u(rng), u(rng), {u(rng), u(rng)}, t);
    for (std::size_t k = 1; k < t.size(); ++k) {
      CHECK(traj[k].n_a + traj[k].n_x <= traj[k - 1].n_a + traj[k - 1].n_x + 1e-14);
      CHECK(traj[k].n_x >= 0.0);
      CHECK(traj[k].n_x <= 1.0);
    }
  }

  // Long times stay finite.
  const auto late = two_box_evolve(2.0, 5.0, 0.01, {0.0, 1.0}, {1e4});
  CHECK(std::isfinite(late[0].n_x));
  CHECK(late[0].n_x >= 0.0);
}

TEST_CASE("two-box model tracks the full master equation when incoherent") {
  const SystemParams p{1.0, 5.0, 0.01, 20.0, 10.0, 0.0, 2};
  const double R = effective_coupling(p);
  std::vector<double> t;
  for (int k = 0; k <= 200; ++k) t.push_back(5.0 / R * k / 200.0);
  const auto me = evolve(build_liouvillian(p), DensityMatrix::basis_state(Basis(2), Atom::excited, 0), t);
  const auto box = two_box_evolve(R, p.kappa, p.gamma, {0.0, 1.0}, t);
  double sup = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) sup = std::max(sup, std::abs(me.n_x[k] - box[k].n_x));
  CHECK(sup < 0.05);
}

TEST_CASE("regime classification") {
  SystemParams p{1.0, 0.2, 0.01, 0.0, 0.0, 0.0, 1};
  CHECK(classify_regime(p).good_cavity);
  p.gamma_star = 40.0;
  CHECK(effective_coupling(p) == Approx(0.0995).epsilon(1e-3));
  CHECK_FALSE(classify_regime(p).good_cavity);

  SystemParams edge{1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1};
  const auto r = classify_regime(edge);
  CHECK_FALSE(r.strong_coupling);
  CHECK_FALSE(r.coherent);

  SystemParams quench{1.0, 0.2, 0.01, 0.0, 0.0, 15.0, 1};
  CHECK(classify_regime(quench).good_cavity);
  quench.pump = 25.0;
  CHECK_FALSE(classify_regime(quench).good_cavity);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const auto q = oracle::random_params(rng, 1);
    const auto rep = classify_regime(q);
    if (rep.coherent) CHECK(rep.strong_coupling);
    CHECK_FALSE((rep.good_cavity && rep.purcell));
    if (!rep.coherent) CHECK(rep.adiabatic_valid);
  }
}
