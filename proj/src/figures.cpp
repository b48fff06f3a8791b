#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "cqed/analytics.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/ratelaser.hpp"
#include "cqed/sweep.hpp"

namespace cqed::sweep {

namespace {

namespace fs = std::filesystem;

using Row = std::vector<std::optional<double>>;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const std::vector<Row>& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const Row& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (row[c]) out << format_number(*row[c]);
    }
    out << '\n';
  }
  write_text(path, out.str());
}

std::vector<double> linspace(double lo, double hi, int points) {
  return Grid{lo, hi, points, Scale::linear}.values();
}

fs::path coupling_vs_dephasing(const fs::path& file, const SystemParams& p, double gs_max) {
  std::vector<Row> rows;
  for (const double gs : linspace(0.0, gs_max, 601)) {
    rows.push_back({gs, analytics::effective_coupling(p.g, p.kappa, p.gamma, gs, p.delta), p.kappa});
  }
  write_table(file, {"gamma_star", "R_eff", "kappa"}, rows);
  return file;
}

fs::path pump_sweep_file(const fs::path& file, const SweepSpec& spec, const RunOptions& options) {
  write_text(file, to_csv(run_sweep(spec, options)));
  return file;
}

std::vector<fs::path> figure2(const fs::path& dir) {
  std::vector<fs::path> files;
  const std::vector<double> times = linspace(0.0, 100.0, 201);
  for (const auto& [delta, label] : {std::pair{0.0, "resonant"}, std::pair{10.0, "detuned"}}) {
    std::vector<std::vector<double>> traces;
    SystemParams uncoupled = purcell_params(delta, 0.0);
    uncoupled.g = 0.0;
    for (const SystemParams& p :
         {uncoupled, purcell_params(delta, 0.0), purcell_params(delta, 20.0)}) {
      const Liouvillian L = build_liouvillian(p);
      const auto rho0 = DensityMatrix::basis_state(Basis(p.n_max), Atom::excited, 0);
      traces.push_back(evolve(L, rho0, times).n_x);
    }
    std::vector<Row> rows;
    for (std::size_t k = 0; k < times.size(); ++k) {
      rows.push_back({times[k], traces[0][k], traces[1][k], traces[2][k]});
    }
    const fs::path traces_file = dir / ("fig2_" + std::string(label) + "_traces.csv");
    write_table(traces_file, {"t", "n_x_uncoupled", "n_x_gamma_star_0", "n_x_gamma_star_20"}, rows);
    files.push_back(traces_file);
    files.push_back(coupling_vs_dephasing(dir / ("fig2_" + std::string(label) + "_R.csv"),
                                          purcell_params(delta, 0.0), 40.0));
  }
  return files;
}

std::vector<fs::path> figure3(const fs::path& dir) {
  std::vector<fs::path> files;
  constexpr double kappa = 0.2;
  for (const auto& [R, label] : {std::pair{1.0, "good_cavity"}, std::pair{0.1, "bad_cavity"}}) {
    std::vector<Row> rows;
    for (int k = 0; k <= 200; ++k) {
      const double inversion = -1.0 + 2.0 * k / 200.0;
      std::optional<double> n_a;
      try {
        n_a = ratelaser::na_of_inversion(inversion, R, kappa);
      } catch (const PoleDomain&) {
      }
      rows.push_back({inversion, n_a});
    }
    const fs::path file = dir / ("fig3_" + std::string(label) + ".csv");
    write_table(file, {"inversion", "n_a"}, rows);
    files.push_back(file);
  }
  return files;
}

std::vector<fs::path> lasing_figure(const fs::path& dir, const std::string& prefix, double delta,
                                    std::initializer_list<double> dephasings, double gs_max,
                                    bool pump_inset, const RunOptions& options) {
  std::vector<fs::path> files;
  for (const double gs : dephasings) {
    std::ostringstream name;
    name << prefix << "_pump_gamma_star_" << gs << ".csv";
    files.push_back(pump_sweep_file(dir / name.str(), lasing_pump_sweep(delta, gs), options));
  }
  const SystemParams base = lasing_pump_sweep(delta, 0.0).base;
  files.push_back(coupling_vs_dephasing(dir / (prefix + "_R_vs_gamma_star.csv"), base, gs_max));
  if (pump_inset) {
    std::vector<Row> rows;
    for (const double pump : lasing_pump_sweep(delta, 0.0).grid.values()) {
      SystemParams p = base;
      p.pump = pump;
      rows.push_back({pump, analytics::pumped_rates(p).R_tilde, p.kappa});
    }
    const fs::path file = dir / (prefix + "_R_vs_pump.csv");
    write_table(file, {"pump", "R_eff", "kappa"}, rows);
    files.push_back(file);
  }
  return files;
}

}  // namespace

SweepSpec lasing_pump_sweep(double delta, double gamma_star, int n_max, int points) {
  SweepSpec spec;
  spec.base = SystemParams{1.0, 0.2, 0.01, gamma_star, delta, 0.0, n_max};
  spec.axis = Axis::pump;
  spec.grid = Grid{0.01, 200.0, points, Scale::log};
  spec.engine = Engine::full_me;
  return spec;
}

SystemParams purcell_params(double delta, double gamma_star, int n_max) {
  return SystemParams{1.0, 5.0, 0.01, gamma_star, delta, 0.0, n_max};
}

std::vector<fs::path> reproduce_figure(Figure id, const fs::path& outdir,
                                       const RunOptions& options) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create " + outdir.string() + ": " + ec.message());
  switch (id) {
    case Figure::fig2: return figure2(outdir);
    case Figure::fig3: return figure3(outdir);
    case Figure::fig4: return lasing_figure(outdir, "fig4", 0.0, {0.0, 40.0}, 60.0, true, options);
    case Figure::fig5: return lasing_figure(outdir, "fig5", 2.0, {0.0, 2.0}, 10.0, false, options);
  }
  return {};
}

}  // namespace cqed::sweep
