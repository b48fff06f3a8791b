#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"

namespace cqed {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (difference between the 5th- and 4th-order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double real_expectation(const OperatorMatrix& op, const OperatorMatrix& rho) {
  return (op * rho).trace().real();
}

}  // namespace

Trajectory evolve(const Liouvillian& L, const DensityMatrix& rho0,
                  const std::vector<double>& t_grid, const EvolveOptions& options) {
  const Eigen::Index d = L.hilbert_dim();
  if (rho0.dim() != d) throw DimensionError("initial state does not match the Liouvillian");
  if (t_grid.empty()) throw ParameterError("time grid is empty");
  if (t_grid.front() < 0.0) throw ParameterError("time grid must start at t >= 0");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw ParameterError("time grid must be strictly increasing");
  }

  const Operators ops = build_operators(L.params());
  const OperatorMatrix number = ops.a_dag * ops.a;
  const OperatorMatrix excited = ops.sigma_plus * ops.sigma_minus;
  const SuperMatrix& m = L.matrix();

  Trajectory out;
  auto record = [&](double t, const Eigen::VectorXcd& y) {
    OperatorMatrix rho = unvectorize(y, d);
    out.trace_drift = std::max(out.trace_drift, std::abs(rho.trace() - 1.0));
    rho = (0.5 * (rho + rho.adjoint())).eval();
    rho /= rho.trace().real();
    out.times.push_back(t);
    out.n_a.push_back(real_expectation(number, rho));
    out.n_x.push_back(real_expectation(excited, rho));
    out.states.emplace_back(std::move(rho));
  };

  Eigen::VectorXcd y = vectorize(rho0.matrix());
  double t = 0.0;
  std::size_t next = 0;
  // Grid points at t = 0 need no integration.
  while (next < t_grid.size() && t_grid[next] == 0.0) record(0.0, y), ++next;

  Eigen::VectorXcd k1 = m * y, k2, k3, k4, k5, k6, k7, y_new, err;
  double h = options.initial_step;
  std::size_t steps = 0;

  while (next < t_grid.size()) {
    const double target = t_grid[next];
    h = std::min(h, target - t);
    const double min_step = options.min_step * std::max(1.0, std::abs(t));
    if (h < min_step || ++steps > options.max_steps) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t;
      throw StepFailure(msg.str(), t);
    }

    k2 = m * (y + h * (a21 * k1));
    k3 = m * (y + h * (a31 * k1 + a32 * k2));
    k4 = m * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = m * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = m * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = m * y_new;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          options.abs_tol + options.rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      const double r = std::abs(err(i)) / scale;
      norm += r * r;
    }
    norm = std::sqrt(norm / static_cast<double>(y.size()));

    if (norm <= 1.0) {
      const bool landed = (h == target - t);
      t = landed ? target : t + h;
      y.swap(y_new);
      k1 = k7;  // first-same-as-last
      if (landed) record(t, y), ++next;
    }
    const double factor =
        norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= factor;
  }
  return out;
}

}  // namespace cqed
