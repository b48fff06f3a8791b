#pragma once

#include <optional>
#include <span>

#include "cqed/analytics.hpp"
#include "cqed/hilbert.hpp"

namespace cqed {

/// Tr(O rho). Throws DimensionError on mismatched shapes.
Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op);

/// Below this mean photon number g2(0) is reported as undefined.
inline constexpr double kVacuumPhotonNumber = 1e-9;

/// <a^dag a^dag a a> / <a^dag a>^2, or nullopt for an (almost) empty cavity.
std::optional<double> g2_zero(const DensityMatrix& rho);

struct SteadyObservables {
  double n_a = 0.0;
  double n_x = 0.0;
  double sigma_z = 0.0;
  std::optional<double> g2_0;
  double N_rate = 0.0;  // kappa * n_a
  analytics::RegimeReport regime;
};

SteadyObservables observe(const DensityMatrix& rho, const SystemParams& params);

/// Longest contiguous run of sweep points with |g2(0) - 1| <= tolerance.
/// Undefined g2 values break a run.
struct PoissonianPlateau {
  bool found = false;    // span_decades >= min_decades
  double p_low = 0.0;    // first pump of the longest run
  double p_high = 0.0;   // last pump of the longest run
  double span_decades = 0.0;
  std::size_t first = 0;  // indices into the sweep
  std::size_t last = 0;
};

inline constexpr double kPoissonianTolerance = 0.1;
inline constexpr double kPlateauMinDecades = 1.0;

/// `pumps` must be strictly increasing and positive.
PoissonianPlateau find_poissonian_plateau(std::span<const double> pumps,
                                          std::span<const std::optional<double>> g2,
                                          double tolerance = kPoissonianTolerance,
                                          double min_decades = kPlateauMinDecades);

}  // namespace cqed
