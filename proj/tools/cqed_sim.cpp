// cqed_sim: sweeps, figure data and closed-form reports for the pumped,
// dephased Jaynes-Cummings model.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cqed/analytics.hpp"
#include "cqed/errors.hpp"
#include "cqed/sweep.hpp"

namespace {

using namespace cqed;
using Json = nlohmann::ordered_json;

struct ParamFlags {
  SystemParams params{1.0, 0.2, 0.01, 0.0, 0.0, 0.0, 30};
  CLI::Option* g = nullptr;
  CLI::Option* kappa = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* gamma_star = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* pump = nullptr;
  CLI::Option* n_max = nullptr;

  void attach(CLI::App& app) {
    g = app.add_option("--g", params.g, "Coupling g (rates are in units of g)");
    kappa = app.add_option("--kappa", params.kappa, "Cavity damping");
    gamma = app.add_option("--gamma", params.gamma, "Atomic spontaneous decay");
    gamma_star = app.add_option("--gammastar", params.gamma_star, "Pure dephasing");
    delta = app.add_option("--delta", params.delta, "Detuning w_x - w_a");
    pump = app.add_option("--pump", params.pump, "Incoherent pump P_x");
    n_max = app.add_option("--nmax", params.n_max, "Photon truncation");
  }

  // Flags given on the command line override `base`.
  SystemParams overlay(SystemParams base) const {
    if (g->count()) base.g = params.g;
    if (kappa->count()) base.kappa = params.kappa;
    if (gamma->count()) base.gamma = params.gamma;
    if (gamma_star->count()) base.gamma_star = params.gamma_star;
    if (delta->count()) base.delta = params.delta;
    if (pump->count()) base.pump = params.pump;
    if (n_max->count()) base.n_max = params.n_max;
    return base;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json regime_json(const analytics::RegimeReport& r) {
  return Json{{"good_cavity", r.good_cavity},
              {"strong_coupling", r.strong_coupling},
              {"coherent", r.coherent},
              {"purcell", r.purcell},
              {"adiabatic_valid", r.adiabatic_valid}};
}

template <class F>
Json guarded(F&& f) {
  try {
    return Json(f());
  } catch (const Error&) {
    return Json(nullptr);
  }
}

Json analytic_report(const SystemParams& p) {
  using namespace analytics;
  const double R = effective_coupling(p);
  const auto rates = pumped_rates(p);
  const auto pops = steady_populations_badcavity(p);
  Json out{{"params",
            {{"g", p.g},
             {"kappa", p.kappa},
             {"gamma", p.gamma},
             {"gamma_star", p.gamma_star},
             {"delta", p.delta},
             {"pump", p.pump}}},
           {"R", R},
           {"Gamma", rates.Gamma},
           {"R_tilde", rates.R_tilde},
           {"beta", guarded([&] { return efficiency_beta(R, p.kappa, p.gamma); })},
           {"purcell_factor",
            guarded([&] { return purcell_factor(p.g, p.kappa, p.gamma, p.gamma_star, p.delta); })},
           {"bad_cavity",
            {{"n_x", pops.n_x},
             {"n_a", pops.n_a},
             {"N_rate", pops.N_rate},
             {"N_sat", pops.N_sat},
             {"applicable", pops.applicable}}}};
  if (p.delta > 0.0) {
    const auto opt = optimal_dephasing(p.g, p.kappa, p.gamma, p.delta);
    out["optimal_dephasing"] = {
        {"gamma_star_opt", opt.gamma_star_opt}, {"R_max", opt.r_max}, {"reachable", opt.reachable}};
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative Jaynes-Cummings simulator"};
  app.require_subcommand(1);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one rate and write CSV or JSON");
  ParamFlags sweep_params;
  sweep_params.attach(*sweep_cmd);
  std::string spec_file, axis = "pump", engine = "full_me", out_path, format = "csv";
  std::string outputs;
  double grid_min = 0.01, grid_max = 200.0;
  int points = 60;
  bool log_scale = false, linear_scale = false, n_max_check = false, dense = false,
       no_timestamp = false;
  unsigned threads = 0;
  sweep_cmd->add_option("--spec", spec_file, "JSON sweep spec; flags override its values");
  auto* axis_opt = sweep_cmd->add_option("--axis", axis, "pump|gamma_star|delta|gamma|kappa");
  auto* min_opt = sweep_cmd->add_option("--min", grid_min, "Grid start");
  auto* max_opt = sweep_cmd->add_option("--max", grid_max, "Grid end");
  auto* points_opt = sweep_cmd->add_option("--points", points, "Grid points");
  auto* log_opt = sweep_cmd->add_flag("--log", log_scale, "Log-spaced grid (default for pump)");
  auto* linear_opt = sweep_cmd->add_flag("--linear", linear_scale, "Linearly spaced grid");
  auto* engine_opt =
      sweep_cmd->add_option("--engine", engine, "full_me|bad_cavity_analytic|rate_equations");
  auto* outputs_opt = sweep_cmd->add_option(
      "--outputs", outputs, "Comma list of n_a,n_x,sigma_z,g2_0,N_rate,R_eff,regime");
  auto* check_opt = sweep_cmd->add_flag("--nmax-check", n_max_check, "Re-solve at n_max + 5");
  sweep_cmd->add_option("--out", out_path, "Output file (stdout when omitted)");
  sweep_cmd->add_option("--format", format, "csv|json");
  sweep_cmd->add_option("--threads", threads, "Worker threads (default CQED_SIM_THREADS or cores)");
  sweep_cmd->add_flag("--dense", dense, "Solve on the full dense Liouvillian");
  sweep_cmd->add_flag("--no-timestamp", no_timestamp, "Leave the provenance timestamp empty");

  // figure
  auto* figure_cmd = app.add_subcommand("figure", "Write the CSV panels of one figure");
  std::string figure_id, figure_dir = ".";
  figure_cmd->add_option("--id", figure_id, "fig2|fig3|fig4|fig5")->required();
  figure_cmd->add_option("--out", figure_dir, "Output directory");
  figure_cmd->add_option("--threads", threads, "Worker threads");

  // regime / analytic
  auto* regime_cmd = app.add_subcommand("regime", "Classify the coupling regime");
  ParamFlags regime_params;
  regime_params.attach(*regime_cmd);
  auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form rates and populations");
  ParamFlags analytic_params;
  analytic_params.attach(*analytic_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep_cmd) {
      sweep::SweepSpec spec;
      spec.base = SystemParams{1.0, 0.2, 0.01, 0.0, 0.0, 0.0, 30};
      if (!spec_file.empty()) spec = sweep::spec_from_json(read_file(spec_file));
      spec.base = sweep_params.overlay(spec.base);
      if (axis_opt->count()) spec.axis = sweep::parse_axis(axis);
      if (min_opt->count()) spec.grid.min = grid_min;
      if (max_opt->count()) spec.grid.max = grid_max;
      if (points_opt->count()) spec.grid.points = points;
      if (log_opt->count()) spec.grid.scale = sweep::Scale::log;
      if (linear_opt->count()) spec.grid.scale = sweep::Scale::linear;
      if (spec_file.empty() && !log_opt->count() && !linear_opt->count()) {
        spec.grid.scale = spec.axis == sweep::Axis::pump ? sweep::Scale::log : sweep::Scale::linear;
      }
      if (engine_opt->count()) spec.engine = sweep::parse_engine(engine);
      if (outputs_opt->count()) {
        spec.outputs.clear();
        std::stringstream list(outputs);
        for (std::string item; std::getline(list, item, ',');) {
          if (!item.empty()) spec.outputs.push_back(sweep::parse_output(item));
        }
      }
      if (check_opt->count()) spec.n_max_check = true;

      sweep::RunOptions options;
      options.threads = threads;
      options.solver = dense ? SteadySolver::dense : SteadySolver::sector;
      options.timestamp = !no_timestamp;
      const auto fmt = sweep::parse_format(format);
      const auto result = sweep::run_sweep(spec, options);
      if (out_path.empty()) {
        std::cout << (fmt == sweep::Format::csv ? sweep::to_csv(result) : sweep::to_json(result));
      } else {
        sweep::emit(result, fmt, out_path);
      }
    } else if (*figure_cmd) {
      sweep::RunOptions options;
      options.threads = threads;
      for (const auto& path :
           sweep::reproduce_figure(sweep::parse_figure(figure_id), figure_dir, options)) {
        std::cout << path.string() << '\n';
      }
    } else if (*regime_cmd) {
      const SystemParams p = regime_params.overlay(regime_params.params);
      p.validate();
      Json out = regime_json(analytics::classify_regime(p));
      out["R_used"] = p.pump > 0.0 ? analytics::pumped_rates(p).R_tilde
                                   : analytics::effective_coupling(p);
      std::cout << out.dump(2) << '\n';
    } else if (*analytic_cmd) {
      const SystemParams p = analytic_params.overlay(analytic_params.params);
      p.validate();
      std::cout << analytic_report(p).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
