#include "cqed/observables.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

int n_max_of(const DensityMatrix& rho) {
  const auto d = rho.dim();
  if (d < 4 || d % 2 != 0) throw DimensionError("state is not on an atom x cavity space");
  return static_cast<int>(d / 2 - 1);
}

}  // namespace

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw DimensionError("operator and state dimensions differ");
  }
  // Tr(O rho) = sum_ij O(i, j) rho(j, i)
  return op.cwiseProduct(rho.matrix().transpose()).sum();
}

std::optional<double> g2_zero(const DensityMatrix& rho) {
  SystemParams p;
  p.n_max = n_max_of(rho);
  const Operators ops = build_operators(p);
  const double n_a = expectation(rho, ops.a_dag * ops.a).real();
  if (n_a < kVacuumPhotonNumber) return std::nullopt;
  const double pairs = expectation(rho, ops.a_dag * ops.a_dag * ops.a * ops.a).real();
  return pairs / (n_a * n_a);
}

SteadyObservables observe(const DensityMatrix& rho, const SystemParams& params) {
  if (n_max_of(rho) != params.n_max) throw DimensionError("state truncation differs from params");
  const Operators ops = build_operators(params);
  SteadyObservables out;
  out.n_a = expectation(rho, ops.a_dag * ops.a).real();
  out.n_x = expectation(rho, ops.sigma_plus * ops.sigma_minus).real();
  out.sigma_z = expectation(rho, ops.sigma_z).real();
  out.g2_0 = g2_zero(rho);
  out.N_rate = params.kappa * out.n_a;
  out.regime = analytics::classify_regime(params);
  return out;
}

PoissonianPlateau find_poissonian_plateau(std::span<const double> pumps,
                                          std::span<const std::optional<double>> g2,
                                          double tolerance, double min_decades) {
  if (pumps.size() != g2.size()) throw DimensionError("pump and g2 series differ in length");
  for (std::size_t k = 0; k < pumps.size(); ++k) {
    if (!(pumps[k] > 0.0) || (k > 0 && !(pumps[k] > pumps[k - 1]))) {
      throw ParameterError("pump grid must be positive and strictly increasing");
    }
  }

  PoissonianPlateau best;
  bool have_best = false;
  std::size_t k = 0;
  while (k < pumps.size()) {
    auto inside = [&](std::size_t i) { return g2[i] && std::abs(*g2[i] - 1.0) <= tolerance; };
    if (!inside(k)) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end + 1 < pumps.size() && inside(end + 1)) ++end;
    const double span = std::log10(pumps[end] / pumps[k]);
    if (!have_best || span > best.span_decades) {
      best = {false, pumps[k], pumps[end], span, k, end};
      have_best = true;
    }
    k = end + 1;
  }
  best.found = have_best && best.span_decades >= min_decades;
  return best;
}

}  // namespace cqed
