#pragma once

// Truncated atom (x) cavity Hilbert space and the elementary operators of the
// dissipative Jaynes-Cummings model.
//
// Basis ordering is atom-major:
//
//     index(atom, n) = atom * (n_max + 1) + n,   atom = 0 (|g>) or 1 (|e>)
//
// so |g,0>, |g,1>, ..., |g,n_max>, |e,0>, ..., |e,n_max>. Operators are dense
// D x D complex matrices with D = 2 (n_max + 1). The Hamiltonian is written in
// the frame rotating at the cavity frequency; only the detuning
// delta = w_x - w_a survives. hbar = 1 and all rates share one unit (usually g).

#include <complex>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace cqed {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;

struct SystemParams {
  double g = 1.0;           // atom-cavity coupling
  double kappa = 0.0;       // cavity damping
  double gamma = 0.0;       // spontaneous emission out of the cavity mode
  double gamma_star = 0.0;  // pure dephasing
  double delta = 0.0;       // w_x - w_a (signed)
  double pump = 0.0;        // incoherent pump P_x
  int n_max = 1;            // highest retained Fock state

  /// Throws ParameterError on negative rates, non-finite values or n_max < 1.
  void validate() const;

  bool operator==(const SystemParams&) const = default;
};

enum class Atom : int { ground = 0, excited = 1 };

/// Index bookkeeping for the composite basis.
class Basis {
 public:
  explicit Basis(int n_max);

  int n_max() const noexcept { return n_max_; }
  Eigen::Index dim() const noexcept { return 2 * (n_max_ + 1); }

  Eigen::Index index(Atom atom, int n) const;
  std::pair<Atom, int> state(Eigen::Index index) const;

  /// Number of excitations a^dag a + sigma_+ sigma_- carried by a basis state.
  int excitations(Eigen::Index index) const;

  /// Column vector of the basis state |atom, n>.
  Eigen::VectorXcd ket(Atom atom, int n) const;

 private:
  int n_max_;
};

struct Operators {
  OperatorMatrix a;
  OperatorMatrix a_dag;
  OperatorMatrix sigma_minus;
  OperatorMatrix sigma_plus;
  OperatorMatrix sigma_z;  // |e><e| - |g><g|
};

/// Literal truncation of the ladder: a|n_max> is kept, a_dag|n_max> = 0.
Operators build_operators(const SystemParams& params);

/// H = delta sigma_+ sigma_- + i g (a_dag sigma_- - sigma_+ a).
OperatorMatrix build_hamiltonian(const SystemParams& params);
OperatorMatrix build_hamiltonian(const SystemParams& params, const Operators& ops);

/// Hermitian, unit-trace, positive semidefinite state of the composite system.
class DensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-8;

  /// Validates the invariants; throws ParameterError with the violated one.
  explicit DensityMatrix(OperatorMatrix entries);

  /// |psi><psi| for a normalized ket.
  static DensityMatrix pure(const Eigen::VectorXcd& psi);
  static DensityMatrix basis_state(const Basis& basis, Atom atom, int n);

  const OperatorMatrix& matrix() const noexcept { return entries_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }

  /// Empty string when `m` satisfies every invariant, otherwise a description.
  static std::string check(const OperatorMatrix& m);

 private:
  OperatorMatrix entries_;
};

}  // namespace cqed
