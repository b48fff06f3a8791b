#include <array>
#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "doctest.h"

#include "cqed/errors.hpp"
#include "cqed/ratelaser.hpp"
#include "oracles.hpp"

using namespace cqed;
using namespace cqed::ratelaser;
using doctest::Approx;

namespace {

LaserRates random_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
  return {log_uniform(1e-3, 1e2), u(rng) < 0.1 ? 0.0 : log_uniform(1e-4, 1.0),
          log_uniform(1e-3, 1e2), u(rng) < 0.1 ? 0.0 : log_uniform(1e-4, 1e3)};
}

}  // namespace

TEST_CASE("rate equation right-hand side") {
  const LaserRates r{0.7, 0.05, 0.2, 0.0};
  const auto rest = rate_rhs(-1.0, 0.0, r);
  CHECK(rest.dI_dt == 0.0);
  CHECK(rest.dna_dt == 0.0);
  CHECK(rate_rhs(1.0, 0.0, r).dna_dt == Approx(0.7));
}

TEST_CASE("rate equations are the factorized incoherent master equation") {
  // Effective model with the atom-cavity exchange as two jump channels of rate R.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n_max = 12;
  const auto o = oracle::operators(n_max);
  for (int trial = 0; trial < 20; ++trial) {
    const LaserRates r{u(rng), u(rng), u(rng), u(rng)};
    const double n_x = u(rng);
    std::vector<double> photons(n_max + 1, 0.0);
    double total = 0.0;
    for (int n = 0; n < n_max - 3; ++n) total += photons[n] = u(rng);
    oracle::Matrix atom = oracle::Matrix::Zero(2, 2);
    atom(0, 0) = 1.0 - n_x;
    atom(1, 1) = n_x;
    oracle::Matrix cavity = oracle::Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n) cavity(n, n) = photons[n] / total;
    const oracle::Matrix rho = oracle::kron(atom, cavity);

    const oracle::Matrix sp = o.sm.adjoint();
    oracle::Matrix d = oracle::lindblad_term(o.a, rho, r.kappa);
    d += oracle::lindblad_term(o.sm, rho, r.gamma);
    d += oracle::lindblad_term(sp, rho, r.pump);
    d += oracle::lindblad_term(o.a.adjoint() * o.sm, rho, r.R);
    d += oracle::lindblad_term(sp * o.a, rho, r.R);

    const oracle::Matrix number = o.a.adjoint() * o.a;
    const double inversion = oracle::trace_product(o.sz, rho).real();
    const double n_a = oracle::trace_product(number, rho).real();
    const auto rhs = rate_rhs(inversion, n_a, r);
    CHECK(rhs.dI_dt == Approx(oracle::trace_product(o.sz, d).real()).epsilon(1e-12));
    CHECK(rhs.dna_dt == Approx(oracle::trace_product(number, d).real()).epsilon(1e-12));
  }
}

TEST_CASE("photon number against inversion") {
  CHECK(na_of_inversion(0.0, 1.0, 0.2) == Approx(2.5).epsilon(1e-15));
  CHECK(na_of_inversion(1.0, 0.1, 0.2) == Approx(1.0).epsilon(1e-15));
  CHECK(na_of_inversion(-1.0, 3.0, 0.2) == 0.0);
  CHECK_THROWS_AS(na_of_inversion(0.2, 1.0, 0.2), PoleDomain);
  CHECK_THROWS_AS(na_of_inversion(0.5, 1.0, 0.2), PoleDomain);
  CHECK(na_of_inversion(0.2 - 1e-9, 1.0, 0.2) > 1e8);

  double previous = -1.0;
  for (double inv = -1.0; inv < 0.2; inv += 0.01) {
    const double n = na_of_inversion(inv, 1.0, 0.2);
    CHECK(n > previous);
    previous = n;
  }
}

TEST_CASE("steady state limits") {
  const auto dark = laser_steady_state({0.5, 0.01, 0.2, 0.0});
  CHECK(dark.inversion == Approx(-1.0));
  CHECK(dark.n_a == 0.0);

  const auto saturated = laser_steady_state({0.1, 0.01, 0.2, 1e6});
  CHECK(saturated.inversion == Approx(1.0).epsilon(1e-4));
  CHECK(saturated.n_a == Approx(1.0).epsilon(1e-4));

  CHECK_THROWS_AS(laser_steady_state({0.5, 0.01, 0.0, 1.0}), NoPhysicalRoot);
  CHECK_THROWS_AS(laser_steady_state({-0.5, 0.01, 0.2, 1.0}), ParameterError);
  CHECK(laser_steady_state({0.0, 0.01, 0.2, 1.0}).branch_info == "linear");
}

TEST_CASE("gain clamping in the good cavity") {
  const LaserRates base{1.0, 0.01, 0.2, 0.0};
  std::vector<LaserSteadyState> states;
  for (double pump : {40.0, 80.0, 160.0}) {
    LaserRates r = base;
    r.pump = pump;
    states.push_back(laser_steady_state(r));
    CHECK(std::abs(states.back().inversion / 0.2 - 1.0) < 0.10);
  }
  CHECK(std::abs(states[1].n_a / states[0].n_a / 2.0 - 1.0) < 0.10);
  CHECK(std::abs(states[2].n_a / states[1].n_a / 2.0 - 1.0) < 0.10);
}

TEST_CASE("steady state is a fixed point for random rates") {
  std::mt19937_64 rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto r = random_rates(rng);
    const auto s = laser_steady_state(r);
    CHECK(s.residual < 1e-10);
    CHECK(s.inversion >= -1.0);
    CHECK(s.inversion <= 1.0);
    CHECK(s.n_a >= 0.0);
    const auto rhs = rate_rhs(s.inversion, s.n_a, r);
    const double scale = std::max({1.0, s.n_a, r.R, r.pump, r.kappa}) * std::max(1.0, s.n_a);
    CHECK(std::hypot(rhs.dI_dt, rhs.dna_dt) < 1e-10 * scale);
  }
}

TEST_CASE("forward integration converges to the steady state") {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const LaserRates r{0.05 + 2.0 * u(rng), 0.01 + 0.5 * u(rng), 0.05 + 2.0 * u(rng),
                       0.01 + 5.0 * u(rng)};
    const double min_rate = std::min({r.R, r.gamma + r.pump, r.kappa});
    State y{-1.0, 0.0};
    auto system = [&](const State& x, State& dxdt, double) {
      const auto d = rate_rhs(x[0], x[1], r);
      dxdt = {d.dI_dt, d.dna_dt};
    };
    odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-12, 1e-12),
                               system, y, 0.0, 1e3 / min_rate, 0.01);
    const auto s = laser_steady_state(r);
    CHECK(y[0] == Approx(s.inversion).epsilon(1e-6));
    CHECK(y[1] == Approx(s.n_a).epsilon(1e-6));
  }
}
