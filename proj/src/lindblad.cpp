#include "cqed/lindblad.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "cqed/errors.hpp"

namespace cqed {

using Eigen::Index;

Eigen::VectorXcd vectorize(const OperatorMatrix& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

OperatorMatrix unvectorize(const Eigen::VectorXcd& v, Index dim) {
  if (v.size() != dim * dim) throw DimensionError("vector length is not dim^2");
  return Eigen::Map<const OperatorMatrix>(v.data(), dim, dim);
}

namespace {

struct Nonzero {
  Index row;
  Index col;
  Complex value;
};

std::vector<Nonzero> nonzeros(const OperatorMatrix& m) {
  std::vector<Nonzero> out;
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) != Complex(0.0, 0.0)) out.push_back({r, c, m(r, c)});
    }
  }
  return out;
}

// Accumulates scale * (X -> A X B) into `target`. The map sends a column-stacked
// index i + D*j to a row/column of `target`, or -1 when it lies outside.
template <class IndexMap>
void add_sandwich(SuperMatrix& target, const IndexMap& map, Index d, Complex scale,
                  const std::vector<Nonzero>& left, const std::vector<Nonzero>& right) {
  // (A X B)(i, j) = sum A(i, i') X(i', j') B(j', j)
  for (const auto& a : left) {
    for (const auto& b : right) {
      const Index row = map(a.row + d * b.col);
      const Index col = map(a.col + d * b.row);
      if (row < 0 || col < 0) {
        assert(row < 0 && col < 0);
        continue;
      }
      target(row, col) += scale * a.value * b.value;
    }
  }
}

template <class IndexMap>
void assemble(SuperMatrix& target, const IndexMap& map, const SystemParams& p) {
  const Operators ops = build_operators(p);
  const Index d = ops.a.rows();
  const auto identity = nonzeros(OperatorMatrix::Identity(d, d));
  const auto hamiltonian = nonzeros(build_hamiltonian(p, ops));
  const Complex i(0.0, 1.0);

  add_sandwich(target, map, d, -i, hamiltonian, identity);
  add_sandwich(target, map, d, i, identity, hamiltonian);

  const std::pair<const OperatorMatrix*, double> channels[] = {
      {&ops.a, p.kappa}, {&ops.sigma_minus, p.gamma}, {&ops.sigma_plus, p.pump}};
  for (const auto& [jump, rate] : channels) {
    if (rate == 0.0) continue;
    const OperatorMatrix jump_dag = jump->adjoint();
    const auto number = nonzeros(jump_dag * *jump);
    add_sandwich(target, map, d, rate, nonzeros(*jump), nonzeros(jump_dag));
    add_sandwich(target, map, d, -0.5 * rate, number, identity);
    add_sandwich(target, map, d, -0.5 * rate, identity, number);
  }

  if (p.gamma_star != 0.0) {
    const auto sz = nonzeros(ops.sigma_z);
    add_sandwich(target, map, d, 0.25 * p.gamma_star, sz, sz);
    add_sandwich(target, map, d, -0.25 * p.gamma_star, identity, identity);
  }
}

SteadyState ground_state(const SystemParams& p) {
  const Basis basis(p.n_max);
  return {DensityMatrix::basis_state(basis, Atom::ground, 0), 0.0, false};
}

// Shared trace-constrained solve. `diagonal` lists the generator coordinates
// holding rho(i, i); the first one carries the replaced equation row.
template <class ToMatrix, class ToVector>
SteadyState solve_null(const SuperMatrix& generator, const std::vector<Index>& diagonal,
                       const SystemParams& p, const SteadyStateOptions& options,
                       const ToMatrix& to_matrix, const ToVector& to_vector) {
  if (p.pump + p.gamma + p.kappa == 0.0) {
    SteadyState s = ground_state(p);
    s.residual = (generator * to_vector(s.rho.matrix())).norm();
    return s;
  }

  struct Candidate {
    OperatorMatrix rho;
    double residual;
  };
  auto finalize = [&](const Eigen::VectorXcd& x) -> std::optional<Candidate> {
    if (!x.allFinite()) return std::nullopt;
    OperatorMatrix m = to_matrix(x);
    m = (0.5 * (m + m.adjoint())).eval();
    const double tr = m.trace().real();
    if (!(std::abs(tr) > 1e-300)) return std::nullopt;
    m /= tr;
    const Eigen::VectorXcd v = to_vector(m);
    return Candidate{std::move(m), (generator * v).norm() / v.norm()};
  };

  const Index n = generator.rows();
  const Index pinned = diagonal.front();
  SuperMatrix system = generator;
  system.row(pinned).setZero();
  for (const Index k : diagonal) system(pinned, k) = 1.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(pinned) = 1.0;

  Eigen::PartialPivLU<Eigen::Ref<SuperMatrix>> lu(system);
  std::optional<Candidate> best;
  // rcond() misses exact zero pivots, so the pivot spread is checked as well.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
  if (std::min(lu.rcond(), pivot_ratio) >= options.min_rcond) {
    best = finalize(lu.solve(rhs));
    if (best && best->residual < options.residual_tol) {
      if (auto problem = DensityMatrix::check(best->rho); !problem.empty()) {
        throw NonConvergence("steady state violates density-matrix invariants: " + problem);
      }
      return {DensityMatrix(std::move(best->rho)), best->residual, false};
    }
  }

  Eigen::ComplexEigenSolver<SuperMatrix> eig(generator, true);
  if (eig.info() != Eigen::Success) throw NonConvergence("eigen decomposition failed");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(eig.eigenvalues()(a)) < std::abs(eig.eigenvalues()(b));
  });
  auto raw_residual = [&](const Eigen::VectorXcd& v) {
    return (generator * v).norm() / v.norm();
  };
  const Eigen::VectorXcd first = eig.eigenvectors().col(order[0]);
  if (n > 1) {
    const Eigen::VectorXcd second = eig.eigenvectors().col(order[1]);
    const double overlap =
        std::abs(first.dot(second)) / (first.norm() * second.norm());
    if (raw_residual(first) < options.residual_tol &&
        raw_residual(second) < options.residual_tol && overlap < options.overlap_threshold) {
      std::ostringstream msg;
      msg << "two independent stationary states (overlap " << overlap << ")";
      throw DegenerateNullSpace(msg.str());
    }
  }
  auto candidate = finalize(first);
  if (!candidate || candidate->residual >= options.residual_tol) {
    std::ostringstream msg;
    msg << "steady-state residual "
        << (candidate ? candidate->residual : std::numeric_limits<double>::infinity())
        << " above tolerance " << options.residual_tol;
    throw NonConvergence(msg.str());
  }
  if (auto problem = DensityMatrix::check(candidate->rho); !problem.empty()) {
    throw NonConvergence("steady state violates density-matrix invariants: " + problem);
  }
  return {DensityMatrix(std::move(candidate->rho)), candidate->residual, true};
}

}  // namespace

Liouvillian::Liouvillian(SuperMatrix matrix, SystemParams params)
    : matrix_(std::move(matrix)), params_(params), hilbert_dim_(2 * (params.n_max + 1)) {
  if (matrix_.rows() != hilbert_dim_ * hilbert_dim_ || matrix_.cols() != matrix_.rows()) {
    throw DimensionError("Liouvillian matrix does not match the parameter truncation");
  }
}

OperatorMatrix Liouvillian::apply(const OperatorMatrix& rho) const {
  if (rho.rows() != hilbert_dim_ || rho.cols() != hilbert_dim_) {
    throw DimensionError("state dimension does not match the Liouvillian");
  }
  return unvectorize(matrix_ * vectorize(rho), hilbert_dim_);
}

Liouvillian build_liouvillian(const SystemParams& params, std::size_t cap) {
  params.validate();
  const Index d = 2 * (params.n_max + 1);
  const Index n = d * d;
  if (static_cast<std::size_t>(n) > cap) {
    std::ostringstream msg;
    msg << "Liouvillian dimension " << n << " exceeds cap " << cap;
    throw DimensionError(msg.str());
  }
  SuperMatrix matrix = SuperMatrix::Zero(n, n);
  assemble(matrix, [](Index k) { return k; }, params);
  return Liouvillian(std::move(matrix), params);
}

SectorLiouvillian::SectorLiouvillian(SuperMatrix matrix, std::vector<Element> elements,
                                     SystemParams params)
    : matrix_(std::move(matrix)),
      elements_(std::move(elements)),
      params_(params),
      hilbert_dim_(2 * (params.n_max + 1)) {
  if (matrix_.rows() != static_cast<Index>(elements_.size()) || matrix_.cols() != matrix_.rows()) {
    throw DimensionError("sector matrix does not match its element list");
  }
}

OperatorMatrix SectorLiouvillian::expand(const Eigen::VectorXcd& v) const {
  if (v.size() != dim()) throw DimensionError("sector vector has the wrong length");
  OperatorMatrix m = OperatorMatrix::Zero(hilbert_dim_, hilbert_dim_);
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    m(elements_[k].row, elements_[k].col) = v(static_cast<Index>(k));
  }
  return m;
}

SectorLiouvillian build_sector_liouvillian(const SystemParams& params) {
  params.validate();
  const Basis basis(params.n_max);
  const Index d = basis.dim();

  std::vector<SectorLiouvillian::Element> elements;
  std::vector<Index> lookup(static_cast<std::size_t>(d * d), -1);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      if (basis.excitations(i) != basis.excitations(j)) continue;
      lookup[static_cast<std::size_t>(i + d * j)] = static_cast<Index>(elements.size());
      elements.push_back({i, j});
    }
  }
  const auto n = static_cast<Index>(elements.size());
  SuperMatrix matrix = SuperMatrix::Zero(n, n);
  assemble(matrix, [&](Index k) { return lookup[static_cast<std::size_t>(k)]; }, params);
  return SectorLiouvillian(std::move(matrix), std::move(elements), params);
}

SteadyState steady_state(const Liouvillian& L, const SteadyStateOptions& options) {
  const Index d = L.hilbert_dim();
  std::vector<Index> diagonal;
  for (Index i = 0; i < d; ++i) diagonal.push_back(i + d * i);
  return solve_null(
      L.matrix(), diagonal, L.params(), options,
      [d](const Eigen::VectorXcd& v) { return unvectorize(v, d); },
      [](const OperatorMatrix& m) { return vectorize(m); });
}

SteadyState steady_state(const SectorLiouvillian& L, const SteadyStateOptions& options) {
  std::vector<Index> diagonal;
  const auto& elements = L.elements();
  for (std::size_t k = 0; k < elements.size(); ++k) {
    if (elements[k].row == elements[k].col) diagonal.push_back(static_cast<Index>(k));
  }
  // |g,0><g,0| is the first sector element; keep it as the pinned row.
  assert(elements.front().row == 0 && elements.front().col == 0);
  return solve_null(
      L.matrix(), diagonal, L.params(), options,
      [&L](const Eigen::VectorXcd& v) { return L.expand(v); },
      [&elements](const OperatorMatrix& m) {
        Eigen::VectorXcd v(static_cast<Index>(elements.size()));
        for (std::size_t k = 0; k < elements.size(); ++k) {
          v(static_cast<Index>(k)) = m(elements[k].row, elements[k].col);
        }
        return v;
      });
}

SteadyState solve_steady_state(const SystemParams& params, SteadySolver solver,
                               const SteadyStateOptions& options) {
  if (solver == SteadySolver::dense) return steady_state(build_liouvillian(params), options);
  return steady_state(build_sector_liouvillian(params), options);
}

}  // namespace cqed
