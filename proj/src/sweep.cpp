#include "cqed/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cqed/errors.hpp"
#include "cqed/observables.hpp"
#include "cqed/ratelaser.hpp"

namespace cqed::sweep {

using Json = nlohmann::ordered_json;

namespace {

template <class Enum, std::size_t N>
struct NameTable {
  std::pair<Enum, std::string_view> entries[N];

  std::string_view name(Enum e) const {
    for (const auto& [value, text] : entries) {
      if (value == e) return text;
    }
    return "?";
  }
  Enum parse(std::string_view text, const char* what) const {
    for (const auto& [value, name] : entries) {
      if (name == text) return value;
    }
    throw ParameterError(std::string("unknown ") + what + " '" + std::string(text) + "'");
  }
};

constexpr NameTable<Axis, 5> kAxes{{{Axis::pump, "pump"},
                                    {Axis::gamma_star, "gamma_star"},
                                    {Axis::delta, "delta"},
                                    {Axis::gamma, "gamma"},
                                    {Axis::kappa, "kappa"}}};
constexpr NameTable<Scale, 2> kScales{{{Scale::linear, "linear"}, {Scale::log, "log"}}};
constexpr NameTable<Engine, 3> kEngines{{{Engine::full_me, "full_me"},
                                         {Engine::bad_cavity_analytic, "bad_cavity_analytic"},
                                         {Engine::rate_equations, "rate_equations"}}};
constexpr NameTable<Output, 7> kOutputs{{{Output::n_a, "n_a"},
                                         {Output::n_x, "n_x"},
                                         {Output::sigma_z, "sigma_z"},
                                         {Output::g2_0, "g2_0"},
                                         {Output::N_rate, "N_rate"},
                                         {Output::R_eff, "R_eff"},
                                         {Output::regime, "regime"}}};
constexpr NameTable<Format, 2> kFormats{{{Format::csv, "csv"}, {Format::json, "json"}}};
constexpr NameTable<Figure, 4> kFigures{
    {{Figure::fig2, "fig2"}, {Figure::fig3, "fig3"}, {Figure::fig4, "fig4"}, {Figure::fig5, "fig5"}}};

bool selected(const SweepSpec& spec, Output o) {
  return std::find(spec.outputs.begin(), spec.outputs.end(), o) != spec.outputs.end();
}

std::optional<double>* numeric_slot(PointRecord& r, Output o) {
  switch (o) {
    case Output::n_a: return &r.n_a;
    case Output::n_x: return &r.n_x;
    case Output::sigma_z: return &r.sigma_z;
    case Output::g2_0: return &r.g2_0;
    case Output::N_rate: return &r.N_rate;
    case Output::R_eff: return &r.R_eff;
    case Output::regime: return nullptr;
  }
  return nullptr;
}

const std::optional<double>* numeric_slot(const PointRecord& r, Output o) {
  return numeric_slot(const_cast<PointRecord&>(r), o);
}

constexpr std::pair<bool analytics::RegimeReport::*, std::string_view> kRegimeFlags[] = {
    {&analytics::RegimeReport::good_cavity, "good_cavity"},
    {&analytics::RegimeReport::strong_coupling, "strong_coupling"},
    {&analytics::RegimeReport::coherent, "coherent"},
    {&analytics::RegimeReport::purcell, "purcell"},
    {&analytics::RegimeReport::adiabatic_valid, "adiabatic_valid"}};

struct Observed {
  double n_a, n_x, sigma_z;
  std::optional<double> g2;
};

Observed solve_full(const SystemParams& p, SteadySolver solver, double& residual) {
  const SteadyState ss = solve_steady_state(p, solver);
  const SteadyObservables obs = observe(ss.rho, p);
  residual = ss.residual;
  return {obs.n_a, obs.n_x, obs.sigma_z, obs.g2_0};
}

double relative_change(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), 1e-6);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json params_json(const SystemParams& p) {
  return Json{{"g", p.g},         {"kappa", p.kappa}, {"gamma", p.gamma},
              {"gamma_star", p.gamma_star}, {"delta", p.delta}, {"pump", p.pump},
              {"n_max", p.n_max}};
}

Json spec_json(const SweepSpec& s) {
  Json outputs = Json::array();
  for (const Output o : s.outputs) outputs.push_back(to_string(o));
  return Json{{"base", params_json(s.base)},
              {"axis", to_string(s.axis)},
              {"grid",
               {{"min", s.grid.min},
                {"max", s.grid.max},
                {"points", s.grid.points},
                {"scale", to_string(s.grid.scale)}}},
              {"outputs", outputs},
              {"engine", to_string(s.engine)},
              {"n_max_check", s.n_max_check}};
}

template <class T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

SweepSpec spec_from(const Json& j) {
  SweepSpec s;
  if (j.contains("base")) {
    const Json& b = j.at("base");
    read_if(b, "g", s.base.g);
    read_if(b, "kappa", s.base.kappa);
    read_if(b, "gamma", s.base.gamma);
    read_if(b, "gamma_star", s.base.gamma_star);
    read_if(b, "delta", s.base.delta);
    read_if(b, "pump", s.base.pump);
    read_if(b, "n_max", s.base.n_max);
  }
  if (j.contains("axis")) s.axis = parse_axis(j.at("axis").get<std::string>());
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    read_if(g, "min", s.grid.min);
    read_if(g, "max", s.grid.max);
    read_if(g, "points", s.grid.points);
    if (g.contains("scale")) s.grid.scale = parse_scale(g.at("scale").get<std::string>());
  }
  if (j.contains("outputs")) {
    s.outputs.clear();
    for (const auto& o : j.at("outputs")) s.outputs.push_back(parse_output(o.get<std::string>()));
  }
  if (j.contains("engine")) s.engine = parse_engine(j.at("engine").get<std::string>());
  read_if(j, "n_max_check", s.n_max_check);
  return s;
}

std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '"', '\'');
  return text;
}

}  // namespace

std::string_view to_string(Axis v) { return kAxes.name(v); }
std::string_view to_string(Scale v) { return kScales.name(v); }
std::string_view to_string(Engine v) { return kEngines.name(v); }
std::string_view to_string(Output v) { return kOutputs.name(v); }
std::string_view to_string(Format v) { return kFormats.name(v); }
Axis parse_axis(std::string_view t) { return kAxes.parse(t, "axis"); }
Scale parse_scale(std::string_view t) { return kScales.parse(t, "scale"); }
Engine parse_engine(std::string_view t) { return kEngines.parse(t, "engine"); }
Output parse_output(std::string_view t) { return kOutputs.parse(t, "output"); }
Format parse_format(std::string_view t) { return kFormats.parse(t, "format"); }
Figure parse_figure(std::string_view t) { return kFigures.parse(t, "figure"); }

const std::vector<Output>& all_outputs() {
  static const std::vector<Output> all{Output::n_a,    Output::n_x,   Output::sigma_z,
                                       Output::g2_0,   Output::N_rate, Output::R_eff,
                                       Output::regime};
  return all;
}

std::vector<double> Grid::values() const {
  std::vector<double> v(static_cast<std::size_t>(points));
  const double last = static_cast<double>(points - 1);
  for (int k = 0; k < points; ++k) {
    const double f = k / last;
    if (scale == Scale::linear) {
      v[k] = min + (max - min) * f;
    } else {
      v[k] = std::pow(10.0, std::log10(min) + (std::log10(max) - std::log10(min)) * f);
    }
  }
  v.front() = min;
  v.back() = max;
  return v;
}

SystemParams with_axis(const SystemParams& base, Axis axis, double value) {
  SystemParams p = base;
  switch (axis) {
    case Axis::pump: p.pump = value; break;
    case Axis::gamma_star: p.gamma_star = value; break;
    case Axis::delta: p.delta = value; break;
    case Axis::gamma: p.gamma = value; break;
    case Axis::kappa: p.kappa = value; break;
  }
  return p;
}

void SweepSpec::validate() const {
  base.validate();
  if (!(grid.min < grid.max)) throw ParameterError("grid.min must be < grid.max");
  if (grid.points < 2) throw ParameterError("grid needs at least 2 points");
  if (grid.scale == Scale::log && !(grid.min > 0.0)) {
    throw ParameterError("log grid requires min > 0");
  }
  with_axis(base, axis, grid.min).validate();
  with_axis(base, axis, grid.max).validate();
  if (outputs.empty()) throw ParameterError("no outputs requested");
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    for (std::size_t k = i + 1; k < outputs.size(); ++k) {
      if (outputs[i] == outputs[k]) throw ParameterError("duplicate output");
    }
  }
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CQED_SIM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

PointRecord evaluate_point(const SweepSpec& spec, double axis_value, SteadySolver solver) {
  PointRecord rec;
  rec.axis_value = axis_value;
  try {
    const SystemParams p = with_axis(spec.base, spec.axis, axis_value);
    p.validate();
    const double R = analytics::pumped_rates(p).R_tilde;

    std::optional<double> n_a, n_x, sigma_z, g2;
    switch (spec.engine) {
      case Engine::full_me: {
        double residual = 0.0;
        const Observed o = solve_full(p, solver, residual);
        n_a = o.n_a, n_x = o.n_x, sigma_z = o.sigma_z, g2 = o.g2;
        rec.residual = residual;
        rec.flagged = residual >= kResidualFlag;
        if (spec.n_max_check) {
          SystemParams finer = p;
          finer.n_max += kRefinementStep;
          double finer_residual = 0.0;
          const Observed f = solve_full(finer, solver, finer_residual);
          double change = 0.0;
          if (selected(spec, Output::n_a)) change = std::max(change, relative_change(o.n_a, f.n_a));
          if (selected(spec, Output::N_rate)) change = std::max(change, relative_change(o.n_a, f.n_a));
          if (selected(spec, Output::n_x)) change = std::max(change, relative_change(o.n_x, f.n_x));
          if (selected(spec, Output::sigma_z)) {
            change = std::max(change, relative_change(o.sigma_z, f.sigma_z));
          }
          if (selected(spec, Output::g2_0) && o.g2 && f.g2) {
            change = std::max(change, relative_change(*o.g2, *f.g2));
          }
          rec.refinement_change = change;
          rec.flagged = rec.flagged || change >= kRefinementFlag;
        }
        break;
      }
      case Engine::bad_cavity_analytic: {
        const auto pop = analytics::steady_populations_badcavity(p);
        n_a = pop.n_a, n_x = pop.n_x, sigma_z = 2.0 * pop.n_x - 1.0;
        break;
      }
      case Engine::rate_equations: {
        const auto s = ratelaser::laser_steady_state({R, p.gamma, p.kappa, p.pump});
        n_a = s.n_a, sigma_z = s.inversion, n_x = 0.5 * (1.0 + s.inversion);
        rec.residual = s.residual;
        break;
      }
    }

    if (selected(spec, Output::n_a)) rec.n_a = n_a;
    if (selected(spec, Output::n_x)) rec.n_x = n_x;
    if (selected(spec, Output::sigma_z)) rec.sigma_z = sigma_z;
    if (selected(spec, Output::g2_0)) rec.g2_0 = g2;
    if (selected(spec, Output::N_rate) && n_a) rec.N_rate = p.kappa * *n_a;
    if (selected(spec, Output::R_eff)) rec.R_eff = R;
    if (selected(spec, Output::regime)) rec.regime = analytics::classify_regime(p);
  } catch (const std::exception& e) {
    rec = PointRecord{};
    rec.axis_value = axis_value;
    rec.flagged = true;
    rec.error = e.what();
  }
  return rec;
}

SweepResult run_sweep(const SweepSpec& spec, const RunOptions& options) {
  spec.validate();
  const std::vector<double> values = spec.grid.values();

  SweepResult result;
  result.spec = spec;
  result.records.resize(values.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      result.records[k] = evaluate_point(spec, values[k], options.solver);
    }
  };
  const unsigned threads =
      std::min<unsigned>(resolve_thread_count(options.threads), static_cast<unsigned>(values.size()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  result.provenance.code_version = std::string(kCodeVersion);
  result.provenance.timestamp = options.timestamp ? utc_timestamp() : std::string();
  result.provenance.n_max = spec.base.n_max;
  switch (spec.engine) {
    case Engine::full_me:
      result.provenance.solver =
          options.solver == SteadySolver::sector ? "trace-constrained LU (excitation sector)"
                                                 : "trace-constrained LU (dense)";
      break;
    case Engine::bad_cavity_analytic: result.provenance.solver = "closed form"; break;
    case Engine::rate_equations: result.provenance.solver = "quadratic + Newton polish"; break;
  }
  result.provenance.residual_tol = kResidualFlag;
  result.provenance.refinement_tol = kRefinementFlag;
  return result;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string to_csv(const SweepResult& result) {
  const SweepSpec& spec = result.spec;
  std::ostringstream out;
  out << to_string(spec.axis);
  for (const Output o : spec.outputs) out << ',' << to_string(o);
  out << ",residual,status\n";

  for (const PointRecord& r : result.records) {
    out << format_number(r.axis_value);
    for (const Output o : spec.outputs) {
      out << ',';
      if (o == Output::regime) {
        if (!r.regime) continue;
        std::string flags;
        for (const auto& [member, name] : kRegimeFlags) {
          if ((*r.regime).*member) flags += (flags.empty() ? "" : "|") + std::string(name);
        }
        out << (flags.empty() ? "none" : flags);
      } else if (const auto* v = numeric_slot(r, o); v && *v) {
        out << format_number(**v);
      }
    }
    out << ',';
    if (r.residual) out << format_number(*r.residual);
    out << ',';
    if (!r.error.empty()) {
      out << "error: " << csv_safe(r.error);
    } else {
      out << (r.flagged ? "flagged" : "ok");
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json(const SweepResult& result) {
  Json records = Json::array();
  for (const PointRecord& r : result.records) {
    Json rec{{"axis_value", r.axis_value}};
    for (const Output o : result.spec.outputs) {
      if (o == Output::regime) {
        if (!r.regime) {
          rec["regime"] = nullptr;
          continue;
        }
        Json flags = Json::object();
        for (const auto& [member, name] : kRegimeFlags) flags[std::string(name)] = (*r.regime).*member;
        rec["regime"] = flags;
      } else {
        rec[std::string(to_string(o))] = optional_json(*numeric_slot(r, o));
      }
    }
    rec["residual"] = optional_json(r.residual);
    rec["refinement_change"] = optional_json(r.refinement_change);
    rec["flagged"] = r.flagged;
    rec["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
    records.push_back(std::move(rec));
  }
  const Provenance& pv = result.provenance;
  Json doc{{"spec", spec_json(result.spec)},
           {"provenance",
            {{"code_version", pv.code_version},
             {"timestamp", pv.timestamp},
             {"n_max", pv.n_max},
             {"solver", pv.solver},
             {"residual_tol", pv.residual_tol},
             {"refinement_tol", pv.refinement_tol}}},
           {"records", records}};
  return doc.dump(2) + "\n";
}

SweepResult result_from_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("invalid sweep JSON: ") + e.what());
  }
  SweepResult result;
  try {
    result.spec = spec_from(doc.at("spec"));
    const Json& pv = doc.at("provenance");
    result.provenance.code_version = pv.at("code_version").get<std::string>();
    result.provenance.timestamp = pv.at("timestamp").get<std::string>();
    result.provenance.n_max = pv.at("n_max").get<int>();
    result.provenance.solver = pv.at("solver").get<std::string>();
    result.provenance.residual_tol = pv.at("residual_tol").get<double>();
    result.provenance.refinement_tol = pv.at("refinement_tol").get<double>();

    for (const Json& rec : doc.at("records")) {
      PointRecord r;
      r.axis_value = rec.at("axis_value").get<double>();
      for (const Output o : result.spec.outputs) {
        const Json& cell = rec.at(std::string(to_string(o)));
        if (o == Output::regime) {
          if (cell.is_null()) continue;
          analytics::RegimeReport report;
          for (const auto& [member, name] : kRegimeFlags) {
            report.*member = cell.at(std::string(name)).get<bool>();
          }
          r.regime = report;
        } else {
          *numeric_slot(r, o) = optional_from(cell);
        }
      }
      r.residual = optional_from(rec.at("residual"));
      r.refinement_change = optional_from(rec.at("refinement_change"));
      r.flagged = rec.at("flagged").get<bool>();
      if (!rec.at("error").is_null()) r.error = rec.at("error").get<std::string>();
      result.records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed sweep JSON: ") + e.what());
  }
  return result;
}

std::string spec_to_json(const SweepSpec& spec) { return spec_json(spec).dump(2) + "\n"; }

SweepSpec spec_from_json(std::string_view text) {
  try {
    return spec_from(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("invalid sweep spec JSON: ") + e.what());
  }
}

void emit(const SweepResult& result, Format format, const std::filesystem::path& path) {
  const std::string text = format == Format::csv ? to_csv(result) : to_json(result);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string() + ": " + std::strerror(errno));
}

}  // namespace cqed::sweep
