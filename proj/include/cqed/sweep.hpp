#pragma once

// Parameter sweeps over one rate, with CSV/JSON output and canned figure runs.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/analytics.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/lindblad.hpp"

namespace cqed::sweep {

inline constexpr std::string_view kCodeVersion = "cqed-sim 1.0.0";

enum class Axis { pump, gamma_star, delta, gamma, kappa };
enum class Scale { linear, log };
enum class Engine { full_me, bad_cavity_analytic, rate_equations };
enum class Output { n_a, n_x, sigma_z, g2_0, N_rate, R_eff, regime };
enum class Format { csv, json };

std::string_view to_string(Axis);
std::string_view to_string(Scale);
std::string_view to_string(Engine);
std::string_view to_string(Output);
std::string_view to_string(Format);
Axis parse_axis(std::string_view);
Scale parse_scale(std::string_view);
Engine parse_engine(std::string_view);
Output parse_output(std::string_view);
Format parse_format(std::string_view);

struct Grid {
  double min = 0.01;
  double max = 200.0;
  int points = 60;
  Scale scale = Scale::log;

  /// Grid values; the end points are exact.
  std::vector<double> values() const;
  bool operator==(const Grid&) const = default;
};

const std::vector<Output>& all_outputs();

struct SweepSpec {
  SystemParams base;
  Axis axis = Axis::pump;
  Grid grid;
  std::vector<Output> outputs = all_outputs();
  Engine engine = Engine::full_me;
  /// Re-solve every full_me point at n_max + 5 and record the relative change.
  bool n_max_check = false;

  /// Throws ParameterError.
  void validate() const;
  bool operator==(const SweepSpec&) const = default;
};

/// Copy of `base` with the axis rate set to `value`.
SystemParams with_axis(const SystemParams& base, Axis axis, double value);

struct PointRecord {
  double axis_value = 0.0;
  std::optional<double> n_a;
  std::optional<double> n_x;
  std::optional<double> sigma_z;
  std::optional<double> g2_0;
  std::optional<double> N_rate;
  std::optional<double> R_eff;
  std::optional<analytics::RegimeReport> regime;
  /// Steady-state residual actually achieved (full_me, rate_equations).
  std::optional<double> residual;
  /// Largest relative change of a reported observable for n_max -> n_max + 5.
  std::optional<double> refinement_change;
  bool flagged = false;
  /// Empty when the point succeeded.
  std::string error;

  bool operator==(const PointRecord&) const = default;
};

struct Provenance {
  std::string code_version;
  std::string timestamp;  // ISO 8601 UTC, empty when disabled
  int n_max = 0;
  std::string solver;
  double residual_tol = 0.0;
  double refinement_tol = 0.0;

  bool operator==(const Provenance&) const = default;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<PointRecord> records;
  Provenance provenance;

  bool operator==(const SweepResult&) const = default;
};

/// Records flagged when the residual reaches this value.
inline constexpr double kResidualFlag = 1e-9;
/// Records flagged when the n_max refinement changes an observable by this much.
inline constexpr double kRefinementFlag = 1e-3;
inline constexpr int kRefinementStep = 5;

struct RunOptions {
  /// Worker count; 0 reads CQED_SIM_THREADS, then the hardware concurrency.
  unsigned threads = 0;
  SteadySolver solver = SteadySolver::sector;
  bool timestamp = true;
};

unsigned resolve_thread_count(unsigned requested);

/// Evaluates every grid point (concurrently when threads > 1). Point failures
/// land in the record's `error`; an invalid spec throws ParameterError.
SweepResult run_sweep(const SweepSpec& spec, const RunOptions& options = {});

/// One point, as run_sweep computes it.
PointRecord evaluate_point(const SweepSpec& spec, double axis_value,
                           SteadySolver solver = SteadySolver::sector);

std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result);
SweepResult result_from_json(std::string_view text);

std::string spec_to_json(const SweepSpec& spec);
/// Keys missing from the document keep their defaults.
SweepSpec spec_from_json(std::string_view text);

/// Writes the CSV or JSON rendering; throws IoError naming the path.
void emit(const SweepResult& result, Format format, const std::filesystem::path& path);

/// Formats a value with 9 significant digits, as used in CSV cells.
std::string format_number(double value);

/// Pump sweep of the lasing figures: g = 1, kappa = 0.2, gamma = 0.01,
/// P_x log-spaced over [0.01, 200], full master equation.
SweepSpec lasing_pump_sweep(double delta, double gamma_star, int n_max = 30, int points = 60);

/// Relaxation figure parameters: g = 1, kappa = 5, gamma = 0.01, no pump.
SystemParams purcell_params(double delta, double gamma_star, int n_max = 5);

enum class Figure { fig2, fig3, fig4, fig5 };
Figure parse_figure(std::string_view);

/// Runs the canned sweeps of one figure and writes one CSV per panel into
/// `outdir` (created if missing). Returns the written paths in order.
std::vector<std::filesystem::path> reproduce_figure(Figure id, const std::filesystem::path& outdir,
                                                    const RunOptions& options = {});

}  // namespace cqed::sweep
