#pragma once

// Master-equation generator for the pumped, dephased Jaynes-Cummings model:
//
//   d rho/dt = -i[H, rho] + kappa D[a] + gamma D[sigma_-] + P_x D[sigma_+]
//              + (gamma*/4)(sigma_z rho sigma_z - rho),
//   D[c] rho = c rho c^dag - (c^dag c rho + rho c^dag c)/2.
//
// Density matrices are vectorized by column stacking, vec(rho)[i + D*j] =
// rho(i, j), so vec(A X B) = (B^T kron A) vec(X).

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cqed/hilbert.hpp"

namespace cqed {

using SuperMatrix = Eigen::MatrixXcd;
using SuperVector = Eigen::VectorXcd;

Eigen::VectorXcd vectorize(const OperatorMatrix& rho);
OperatorMatrix unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim);

/// Dense D^2 x D^2 Liouvillian on the full operator space.
class Liouvillian {
 public:
  /// Largest D^2 accepted by build_liouvillian unless a cap is passed.
  static constexpr std::size_t kDefaultCap = 10000;

  Liouvillian(SuperMatrix matrix, SystemParams params);

  const SuperMatrix& matrix() const noexcept { return matrix_; }
  const SystemParams& params() const noexcept { return params_; }
  Eigen::Index hilbert_dim() const noexcept { return hilbert_dim_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  /// d rho/dt for the given state, as a D x D matrix.
  OperatorMatrix apply(const OperatorMatrix& rho) const;

 private:
  SuperMatrix matrix_;
  SystemParams params_;
  Eigen::Index hilbert_dim_;
};

Liouvillian build_liouvillian(const SystemParams& params,
                              std::size_t cap = Liouvillian::kDefaultCap);

/// The Liouvillian restricted to the invariant subspace spanned by |i><j|
/// with equal excitation numbers. H conserves a^dag a + sigma_+ sigma_- and
/// every jump operator shifts both sides of rho by the same amount, so the
/// generator is block diagonal in the excitation difference and the unique
/// steady state lives in this block. Its size is 4 n_max + 2.
class SectorLiouvillian {
 public:
  struct Element {
    Eigen::Index row;
    Eigen::Index col;
  };

  SectorLiouvillian(SuperMatrix matrix, std::vector<Element> elements, SystemParams params);

  const SuperMatrix& matrix() const noexcept { return matrix_; }
  const SystemParams& params() const noexcept { return params_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  Eigen::Index hilbert_dim() const noexcept { return hilbert_dim_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  /// Sector vector -> D x D matrix (entries outside the sector are zero).
  OperatorMatrix expand(const Eigen::VectorXcd& v) const;

 private:
  SuperMatrix matrix_;
  std::vector<Element> elements_;
  SystemParams params_;
  Eigen::Index hilbert_dim_;
};

SectorLiouvillian build_sector_liouvillian(const SystemParams& params);

struct SteadyStateOptions {
  double residual_tol = 1e-9;
  /// Two null vectors overlapping less than this count as distinct.
  double overlap_threshold = 0.99;
  /// Reciprocal condition estimate below which the LU route is abandoned.
  double min_rcond = 1e-13;
};

struct SteadyState {
  DensityMatrix rho;
  /// |L vec(rho)| / |vec(rho)| of the returned (Hermitized, normalized) state.
  double residual = 0.0;
  bool eigen_fallback = false;
};

enum class SteadySolver { sector, dense };

/// Null vector of L by the trace-constrained LU solve: the equation row of
/// the |g,0><g,0| element is replaced by Tr(rho) = 1. Falls back to the
/// smallest-magnitude eigenvector when the replaced system is ill-conditioned.
/// The result is Hermitized, then normalized to unit trace.
///
/// Throws NonConvergence when the residual stays above tolerance and
/// DegenerateNullSpace when two distinct stationary states exist. A system
/// with pump + gamma + kappa = 0 returns |g,0><g,0|.
SteadyState steady_state(const Liouvillian& L, const SteadyStateOptions& options = {});
SteadyState steady_state(const SectorLiouvillian& L, const SteadyStateOptions& options = {});

SteadyState solve_steady_state(const SystemParams& params,
                               SteadySolver solver = SteadySolver::sector,
                               const SteadyStateOptions& options = {});

struct EvolveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 1e-3;
  /// Step underflow threshold, relative to max(1, |t|).
  double min_step = 1e-13;
  std::size_t max_steps = 10'000'000;
};

/// Recorded states are Hermitized and renormalized; the integration itself is not.
struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> n_a;
  std::vector<double> n_x;
  /// max_k |Tr(rho(t_k)) - 1|.
  double trace_drift = 0.0;
};

/// Integrates d vec(rho)/dt = L vec(rho) with an embedded Dormand-Prince
/// 5(4) pair under local error control, landing exactly on every grid point.
/// Throws StepFailure when the step size underflows.
Trajectory evolve(const Liouvillian& L, const DensityMatrix& rho0,
                  const std::vector<double>& t_grid, const EvolveOptions& options = {});

}  // namespace cqed
