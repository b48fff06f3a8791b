#include "cqed/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "cqed/errors.hpp"

namespace cqed {

void SystemParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ParameterError(what);
  };
  require(std::isfinite(g) && std::isfinite(kappa) && std::isfinite(gamma) &&
              std::isfinite(gamma_star) && std::isfinite(delta) &&
              std::isfinite(pump),
          "all rates must be finite");
  require(g >= 0.0, "g must be >= 0");
  require(kappa >= 0.0, "kappa must be >= 0");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(gamma_star >= 0.0, "gamma_star must be >= 0");
  require(pump >= 0.0, "pump must be >= 0");
  require(n_max >= 1, "n_max must be >= 1");
}

Basis::Basis(int n_max) : n_max_(n_max) {
  if (n_max < 1) throw ParameterError("n_max must be >= 1");
}

Eigen::Index Basis::index(Atom atom, int n) const {
  if (n < 0 || n > n_max_) throw DimensionError("photon number outside truncation");
  return static_cast<Eigen::Index>(atom) * (n_max_ + 1) + n;
}

std::pair<Atom, int> Basis::state(Eigen::Index index) const {
  if (index < 0 || index >= dim()) throw DimensionError("basis index out of range");
  const auto block = static_cast<Eigen::Index>(n_max_ + 1);
  return {static_cast<Atom>(index / block), static_cast<int>(index % block)};
}

int Basis::excitations(Eigen::Index index) const {
  const auto [atom, n] = state(index);
  return n + static_cast<int>(atom);
}

Eigen::VectorXcd Basis::ket(Atom atom, int n) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
  v(index(atom, n)) = 1.0;
  return v;
}

Operators build_operators(const SystemParams& params) {
  params.validate();
  const Basis basis(params.n_max);
  const auto d = basis.dim();

  Operators ops;
  ops.a = OperatorMatrix::Zero(d, d);
  ops.sigma_minus = OperatorMatrix::Zero(d, d);
  ops.sigma_z = OperatorMatrix::Zero(d, d);

  for (int atom = 0; atom < 2; ++atom) {
    const auto at = static_cast<Atom>(atom);
    for (int n = 1; n <= params.n_max; ++n) {
      ops.a(basis.index(at, n - 1), basis.index(at, n)) = std::sqrt(static_cast<double>(n));
    }
  }
  for (int n = 0; n <= params.n_max; ++n) {
    ops.sigma_minus(basis.index(Atom::ground, n), basis.index(Atom::excited, n)) = 1.0;
    ops.sigma_z(basis.index(Atom::ground, n), basis.index(Atom::ground, n)) = -1.0;
    ops.sigma_z(basis.index(Atom::excited, n), basis.index(Atom::excited, n)) = 1.0;
  }
  ops.a_dag = ops.a.adjoint();
  ops.sigma_plus = ops.sigma_minus.adjoint();
  return ops;
}

OperatorMatrix build_hamiltonian(const SystemParams& params, const Operators& ops) {
  const Complex i_g(0.0, params.g);
  OperatorMatrix h = params.delta * (ops.sigma_plus * ops.sigma_minus);
  h += i_g * (ops.a_dag * ops.sigma_minus - ops.sigma_plus * ops.a);
  return h;
}

OperatorMatrix build_hamiltonian(const SystemParams& params) {
  return build_hamiltonian(params, build_operators(params));
}

std::string DensityMatrix::check(const OperatorMatrix& m) {
  std::ostringstream msg;
  if (m.rows() != m.cols() || m.rows() == 0) return "density matrix must be square and non-empty";
  if (!m.allFinite()) return "density matrix has non-finite entries";
  const double norm = m.norm();
  const double asym = (m - m.adjoint()).norm();
  if (asym > kHermiticityTol * std::max(norm, 1.0)) {
    msg << "not Hermitian (|rho - rho^dag| = " << asym << ")";
    return msg.str();
  }
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    msg << "trace " << tr.real() << "+" << tr.imag() << "i differs from 1";
    return msg.str();
  }
  const OperatorMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> eig(herm, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < -kPositivityTol) {
    msg << "negative eigenvalue " << lowest;
    return msg.str();
  }
  return {};
}

DensityMatrix::DensityMatrix(OperatorMatrix entries) : entries_(std::move(entries)) {
  if (auto problem = check(entries_); !problem.empty()) throw ParameterError(problem);
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::basis_state(const Basis& basis, Atom atom, int n) {
  return pure(basis.ket(atom, n));
}

}  // namespace cqed
