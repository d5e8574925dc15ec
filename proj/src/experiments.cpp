#include "fokker_flux/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "fokker_flux/output.hpp"

namespace fokker_flux {

using nlohmann::json;

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto same_window = [](const std::optional<FitWindow>& x, const std::optional<FitWindow>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->lo == y->lo && x->hi == y->hi);
  };
  return a.model == b.model && a.alpha == b.alpha && a.beta == b.beta && a.gamma == b.gamma &&
         a.potential == b.potential && a.potential_table == b.potential_table && a.initial == b.initial &&
         a.n == b.n && a.dt == b.dt && a.t_end == b.t_end && a.snapshot_times == b.snapshot_times &&
         a.observe_every == b.observe_every && a.scheme == b.scheme && a.newton == b.newton &&
         same_window(a.fit_window, b.fit_window) && a.monitor_every_step == b.monitor_every_step &&
         a.outputs == b.outputs && a.emit == b.emit;
}

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::config, message); }

double get_number(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number()) config_error(fmt::format("'{}' must be a number", key));
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(fmt::format("'{}' must be finite", key));
  return d;
}

int get_int(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) config_error(fmt::format("'{}' must be an integer", key));
  return v.get<int>();
}

std::string get_string(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_string()) config_error(fmt::format("'{}' must be a string", key));
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_array()) config_error(fmt::format("'{}' must be an array of numbers", key));
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) config_error(fmt::format("'{}' must contain only numbers", key));
    out.push_back(e.get<double>());
  }
  return out;
}

void reject_unknown(const json& doc, const std::set<std::string>& allowed, const char* where) {
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.contains(key)) config_error(fmt::format("unknown key '{}' in {}", key, where));
  }
}

InitialSpec parse_initial(const json& doc) {
  if (!doc.is_object()) config_error("'initial' must be an object");
  reject_unknown(doc, {"kind", "slope", "offset", "values"}, "'initial'");
  InitialSpec spec;
  spec.kind = initial_kind_from_string(get_string(doc, "kind"));
  if (spec.kind == InitialKind::affine) {
    if (doc.contains("slope")) spec.slope = get_number(doc, "slope");
    if (doc.contains("offset")) spec.offset = get_number(doc, "offset");
  } else {
    spec.slope = 0.0;
    spec.offset = 0.0;
  }
  if (spec.kind == InitialKind::tabulated) {
    if (!doc.contains("values")) config_error("tabulated initial data needs 'values'");
    spec.table = get_numbers(doc, "values");
  }
  return spec;
}

json initial_to_json(const InitialSpec& spec) {
  json doc = {{"kind", to_string(spec.kind)}};
  if (spec.kind == InitialKind::affine) {
    doc["slope"] = spec.slope;
    doc["offset"] = spec.offset;
  }
  if (spec.kind == InitialKind::tabulated) doc["values"] = spec.table;
  return doc;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) config_error("configuration must be a JSON object");
  reject_unknown(doc,
                 {"model", "alpha", "beta", "gamma", "potential", "potential_table", "initial", "n", "dt",
                  "t_end", "snapshot_times", "observe_every", "scheme", "newton", "fit_window",
                  "monitor_every_step", "outputs", "emit"},
                 "configuration");
  RunConfig cfg;
  try {
    if (doc.contains("model")) cfg.model = model_kind_from_string(get_string(doc, "model"));
    if (doc.contains("alpha")) cfg.alpha = get_number(doc, "alpha");
    if (doc.contains("beta")) cfg.beta = get_number(doc, "beta");
    if (doc.contains("gamma")) cfg.gamma = get_number(doc, "gamma");
    if (doc.contains("potential")) cfg.potential = potential_kind_from_string(get_string(doc, "potential"));
    if (doc.contains("potential_table")) cfg.potential_table = get_numbers(doc, "potential_table");
    if (doc.contains("initial")) cfg.initial = parse_initial(doc.at("initial"));
    if (doc.contains("n")) cfg.n = get_int(doc, "n");
    if (doc.contains("dt")) {
      const json& dt = doc.at("dt");
      if (dt.is_string() && dt.get<std::string>() == "auto") {
        cfg.dt = std::nullopt;
      } else {
        cfg.dt = get_number(doc, "dt");
      }
    }
    if (doc.contains("t_end")) cfg.t_end = get_number(doc, "t_end");
    if (doc.contains("snapshot_times")) cfg.snapshot_times = get_numbers(doc, "snapshot_times");
    if (doc.contains("observe_every")) cfg.observe_every = get_int(doc, "observe_every");
    if (doc.contains("scheme")) cfg.scheme = scheme_from_string(get_string(doc, "scheme"));
    if (doc.contains("newton")) {
      const json& nw = doc.at("newton");
      if (!nw.is_object()) config_error("'newton' must be an object");
      reject_unknown(nw, {"max_iter", "tolerance", "max_halvings"}, "'newton'");
      if (nw.contains("max_iter")) cfg.newton.max_iter = get_int(nw, "max_iter");
      if (nw.contains("tolerance")) cfg.newton.tolerance = get_number(nw, "tolerance");
      if (nw.contains("max_halvings")) cfg.newton.max_halvings = get_int(nw, "max_halvings");
    }
    if (doc.contains("fit_window")) {
      const std::vector<double> w = get_numbers(doc, "fit_window");
      if (w.size() != 2) config_error("'fit_window' must be [t_lo, t_hi]");
      cfg.fit_window = FitWindow{w[0], w[1]};
    }
    if (doc.contains("monitor_every_step")) {
      if (!doc.at("monitor_every_step").is_boolean()) config_error("'monitor_every_step' must be a boolean");
      cfg.monitor_every_step = doc.at("monitor_every_step").get<bool>();
    }
    if (doc.contains("outputs")) cfg.outputs = get_string(doc, "outputs");
    if (doc.contains("emit")) {
      const json& e = doc.at("emit");
      if (!e.is_array()) config_error("'emit' must be an array of strings");
      cfg.emit.clear();
      for (const json& item : e) {
        if (!item.is_string()) config_error("'emit' must be an array of strings");
        const std::string s = item.get<std::string>();
        if (std::find(kEmitKinds.begin(), kEmitKinds.end(), s) == kEmitKinds.end()) {
          config_error(fmt::format("unknown emit kind '{}'", s));
        }
        cfg.emit.push_back(s);
      }
    }
  } catch (const json::exception& e) {
    config_error(fmt::format("malformed configuration: {}", e.what()));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot read configuration '{}'", path));
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    config_error(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json doc = {
      {"model", to_string(c.model)},
      {"alpha", c.alpha},
      {"beta", c.beta},
      {"gamma", c.gamma},
      {"potential", to_string(c.potential)},
      {"initial", initial_to_json(c.initial)},
      {"n", c.n},
      {"t_end", c.t_end},
      {"snapshot_times", c.snapshot_times},
      {"observe_every", c.observe_every},
      {"scheme", to_string(c.scheme)},
      {"newton",
       {{"max_iter", c.newton.max_iter},
        {"tolerance", c.newton.tolerance},
        {"max_halvings", c.newton.max_halvings}}},
      {"monitor_every_step", c.monitor_every_step},
      {"outputs", c.outputs},
      {"emit", c.emit},
  };
  if (c.dt) {
    doc["dt"] = *c.dt;
  } else {
    doc["dt"] = "auto";
  }
  if (c.potential == PotentialKind::tabulated) doc["potential_table"] = c.potential_table;
  if (c.fit_window) doc["fit_window"] = {c.fit_window->lo, c.fit_window->hi};
  return doc;
}

ModelSpec model_spec(const RunConfig& c) {
  return ModelSpec{c.model, c.alpha, c.beta, PotentialSpec{c.potential, c.gamma, c.potential_table}};
}

double resolved_dt(const RunConfig& c) {
  return c.dt ? *c.dt : 0.5 * cfl_max_dt(model_spec(c), Grid(c.n));
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.dt = resolved_dt(c);
  s.t_end = c.t_end;
  s.observe_every = c.observe_every;
  s.scheme = c.scheme;
  s.newton = c.newton;
  s.snapshot_times = c.snapshot_times;
  s.monitor_every_step = c.monitor_every_step;
  return s;
}

void validate_config(const RunConfig& c) {
  const Grid grid(c.n);
  const ModelSpec model = model_spec(c);
  validate(model);
  eval_potential(model.potential, grid);
  if (c.dt && !(*c.dt > 0.0)) config_error(fmt::format("dt must be positive, got {}", *c.dt));
  if (!(c.t_end >= 0.0)) config_error(fmt::format("t_end must be nonnegative, got {}", c.t_end));
  if (c.observe_every < 1) config_error("observe_every must be at least 1");
  for (double s : c.snapshot_times) {
    if (!(s >= 0.0 && s <= c.t_end)) {
      config_error(fmt::format("snapshot time {} outside [0, t_end = {}]", s, c.t_end));
    }
  }
  if (c.newton.max_iter < 1 || !(c.newton.tolerance > 0.0) || c.newton.max_halvings < 0) {
    config_error("newton settings must have max_iter >= 1, tolerance > 0, max_halvings >= 0");
  }
  if (c.fit_window && !(c.fit_window->hi > c.fit_window->lo)) config_error("fit_window must satisfy t_lo < t_hi");
  if (c.scheme == Scheme::implicit_entropy && c.model != ModelKind::C) {
    config_error("scheme 'implicit-entropy' is available for model C only");
  }
  if (c.scheme == Scheme::explicit_euler && c.dt) {
    const double bound = cfl_max_dt(model, grid);
    if (*c.dt > bound * (1.0 + 1e-12)) {
      config_error(fmt::format("dt = {} exceeds the explicit stability bound {}", *c.dt, bound));
    }
  }
  build_initial(c.initial, grid, model);
}

std::string to_string(Extremum e) {
  switch (e) {
    case Extremum::none: return "none";
    case Extremum::maximum: return "maximum";
    case Extremum::minimum: return "minimum";
  }
  return "?";
}

MassStats mass_stats(std::span<const double> t, std::span<const double> m) {
  MassStats s;
  if (m.empty()) return s;
  s.initial = m.front();
  s.final = m.back();
  const auto hi = std::max_element(m.begin(), m.end());
  const auto lo = std::min_element(m.begin(), m.end());
  const auto ihi = static_cast<std::size_t>(hi - m.begin());
  const auto ilo = static_cast<std::size_t>(lo - m.begin());
  const double eps = 1e-12;
  if (ihi > 0 && ihi + 1 < m.size() && *hi > std::max(s.initial, s.final) + eps) {
    s.extremum = Extremum::maximum;
    s.extremum_time = t[ihi];
    s.extremum_value = *hi;
  } else if (ilo > 0 && ilo + 1 < m.size() && *lo < std::min(s.initial, s.final) - eps) {
    s.extremum = Extremum::minimum;
    s.extremum_time = t[ilo];
    s.extremum_value = *lo;
  }
  return s;
}

MassReport mass_report(const ObservationSeries& series, const DensityField& stationary) {
  return MassReport{mass_stats(series.t, series.mass), mass_stats(series.t, series.mass_nodal_mean),
                    mass(stationary), nodal_mean_mass(stationary.values())};
}

namespace {

json eigen_to_json(const EigenResult& e) {
  return {{"equation", to_string(e.equation)},
          {"k", e.k},
          {"lambda", e.lambda},
          {"rate", e.rate},
          {"root_residual", e.root_residual}};
}

json mass_stats_to_json(const MassStats& s) {
  json doc = {{"initial", s.initial}, {"final", s.final}, {"extremum", to_string(s.extremum)}};
  if (s.extremum != Extremum::none) {
    doc["extremum_time"] = s.extremum_time;
    doc["extremum_value"] = s.extremum_value;
  }
  return doc;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const RunSummary& s) {
  json fit = nullptr;
  if (s.fit) {
    fit = {{"fitted_slope", s.fit->fitted_slope},
           {"intercept", s.fit->intercept},
           {"fit_window", {s.fit->window.lo, s.fit->window.hi}},
           {"r_squared", s.fit->r_squared},
           {"samples", s.fit->samples},
           {"predicted_rate", s.predicted.value},
           {"predicted_source", to_string(s.predicted.source)}};
  }
  json eigen = nullptr;
  if (s.friedrichs && s.symmetric) {
    eigen = {{"friedrichs", eigen_to_json(*s.friedrichs)}, {"symmetric", eigen_to_json(*s.symmetric)}};
  }
  json doc = {
      {"config", to_json(s.config)},
      {"model", to_string(s.config.model)},
      {"dt_used", s.dt_used},
      {"steps", s.steps},
      {"fit", fit},
      {"fitted_rate", s.fit ? json(s.fit->fitted_slope) : json(nullptr)},
      {"predicted_rate", s.predicted.value},
      {"predicted_source", to_string(s.predicted.source)},
      {"final_time", s.final_time},
      {"final_sup_distance", s.final_sup_distance},
      {"final_mass", s.final_mass},
      {"final_mass_nodal_mean", s.final_mass_nodal_mean},
      {"stationary",
       {{"closed_form_mass", s.stationary_mass_closed},
        {"numeric_mass", optional_json(s.stationary_mass_numeric)},
        {"closed_vs_numeric_sup", optional_json(s.closed_vs_numeric_sup)}}},
      {"eigen", eigen},
      {"checks",
       {{"min_value", s.min_value},
        {"max_value", s.max_value},
        {"max_entropy_increase", s.max_entropy_increase}}},
      {"mass",
       {{"trapezoid", mass_stats_to_json(s.mass.trapezoid)},
        {"nodal_mean", mass_stats_to_json(s.mass.nodal_mean)},
        {"stationary_trapezoid", s.mass.stationary_trapezoid},
        {"stationary_nodal_mean", s.mass.stationary_nodal_mean}}},
  };
  if (!s.fit) doc["fit_error"] = s.fit_error;
  return doc;
}

RunResult simulate(const RunConfig& config, const Observer& observer) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  const Grid grid(config.n);
  const ModelSpec model = model_spec(config);
  const DensityField initial = build_initial(config.initial, grid, model);
  const SolverConfig solver = solver_config(config);

  const StationarySolution closed = stationary_closed(model, grid);
  std::optional<StationarySolution> numeric;
  if (model.model != ModelKind::C) numeric = stationary_numeric(model, grid);
  const DensityField& reference = numeric ? numeric->field : closed.field;
  const EntropyKind kind = default_entropy(model.model);

  Trajectory traj = run_transient(model, initial, solver, RunReference{reference, kind}, observer);

  RunSummary s;
  s.config = config;
  s.dt_used = solver.dt;
  s.steps = traj.steps;
  s.final_time = traj.final_time;
  s.final_sup_distance = sup_distance(traj.final_field.values(), reference.values());
  s.final_mass = mass(traj.final_field);
  s.final_mass_nodal_mean = nodal_mean_mass(traj.final_field.values());
  s.stationary_mass_closed = mass(closed.field);
  if (numeric) {
    s.stationary_mass_numeric = mass(numeric->field);
    s.closed_vs_numeric_sup = sup_distance(closed.field.values(), numeric->field.values());
  }
  if (model.model == ModelKind::A) {
    s.friedrichs = friedrichs_k(0.5 * model.alpha, 0.5 * model.beta);
    s.symmetric = symmetric_k(model.beta);
  }
  const auto ref_values = reference.values();
  const auto init_values = initial.values();
  const double upper = std::max(*std::max_element(ref_values.begin(), ref_values.end()),
                                *std::max_element(init_values.begin(), init_values.end()));
  s.predicted = predicted_rate(model, reference, RateBounds{upper});

  const FitWindow window = config.fit_window
                               ? *config.fit_window
                               : default_fit_window(traj.series.t, traj.series.entropy, config.t_end);
  try {
    RateReport fit = fit_exponential_rate(traj.series, window);
    fit.predicted = s.predicted;
    s.fit = fit;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::fit) throw;
    s.fit_error = e.what();
  }
  s.min_value = traj.min_value;
  s.max_value = traj.max_value;
  s.max_entropy_increase = traj.max_entropy_increase;
  s.mass = mass_report(traj.series, reference);
  s.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return RunResult{std::move(s), std::move(traj), reference};
}

namespace {

bool emits(const RunConfig& c, const std::string& what) {
  return std::find(c.emit.begin(), c.emit.end(), what) != c.emit.end();
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

void write_artifacts(const RunResult& result) {
  const RunConfig& c = result.summary.config;
  std::error_code ec;
  std::filesystem::create_directories(c.outputs, ec);
  if (ec) throw Error(ErrorCode::io, fmt::format("cannot create output directory '{}': {}", c.outputs, ec.message()));
  const Trajectory& traj = result.trajectory;
  const Grid& grid = result.reference.grid();

  if (emits(c, "entropy")) write_entropy_csv(join(c.outputs, "entropy.csv"), traj.series);
  if (emits(c, "snapshots")) {
    write_snapshots_csv(join(c.outputs, "snapshots.csv"), grid, traj.snapshot_times, traj.snapshots,
                        result.reference);
  }
  if (emits(c, "mass")) {
    write_csv(join(c.outputs, "mass.csv"),
              {{"t", traj.series.t}, {"mass", traj.series.mass}, {"mass_nodal_mean", traj.series.mass_nodal_mean}});
  }
  if (emits(c, "summary")) write_json(join(c.outputs, "summary.json"), to_json(result.summary));
  if (emits(c, "svg")) {
    Chart density{"Density snapshots", "x", "rho", {}};
    const std::vector<double> x = grid.nodes();
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      const auto v = traj.snapshots[k].values();
      density.series.push_back({fmt::format("t = {:g}", traj.snapshot_times[k]), x, {v.begin(), v.end()}});
    }
    const auto inf = result.reference.values();
    density.series.push_back({"rho_inf", x, {inf.begin(), inf.end()}});
    write_svg(join(c.outputs, "snapshots.svg"), density);

    Chart ent{"Relative entropy", "t", "log E", {}};
    LineSeries line{"log E", {}, {}};
    for (std::size_t k = 0; k < traj.series.size(); ++k) {
      if (traj.series.entropy[k] > 0.0) {
        line.x.push_back(traj.series.t[k]);
        line.y.push_back(std::log(traj.series.entropy[k]));
      }
    }
    ent.series.push_back(std::move(line));
    write_svg(join(c.outputs, "entropy.svg"), ent);
  }
}

RunResult run(const RunConfig& config) {
  RunResult result = simulate(config);
  write_artifacts(result);
  return result;
}

std::vector<std::string> preset_names() {
  return {"evolution-A", "entropy-A", "entropy-A-V0", "evolution-B", "entropy-B",
          "evolution-C", "implicit-C", "mass1",      "mass2",       "gamma-sweep"};
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.outputs = fmt::format("out/{}", name);
  c.n = 200;
  c.dt = 5e-6;
  c.initial = InitialSpec{InitialKind::affine, -0.1, 1.2, {}};
  c.potential = PotentialKind::linear;
  c.gamma = 1.0;
  c.emit = {"snapshots", "entropy", "mass", "summary", "svg"};
  if (name == "evolution-A") {
    c.model = ModelKind::A;
    c.alpha = 1.0;
    c.beta = 0.9;
    c.t_end = 9.0;
    c.snapshot_times = {0.0, 0.05, 1.5, 9.0};
  } else if (name == "entropy-A" || name == "gamma-sweep") {
    c.model = ModelKind::A;
    c.alpha = 1.0;
    c.beta = 1.0;
    c.t_end = 6.0;
    c.snapshot_times = {0.0, 0.05, 1.5, 6.0};
  } else if (name == "entropy-A-V0") {
    c.model = ModelKind::A;
    c.alpha = 1.0;
    c.beta = 1.0;
    c.gamma = 0.0;
    c.t_end = 6.0;
    c.snapshot_times = {0.0, 0.05, 1.5, 6.0};
  } else if (name == "evolution-B") {
    c.model = ModelKind::B;
    c.alpha = 1.0;
    c.beta = 0.9;
    c.t_end = 20.0;
    c.snapshot_times = {0.0, 0.05, 1.5, 20.0};
  } else if (name == "entropy-B") {
    c.model = ModelKind::B;
    c.alpha = 1.0;
    c.beta = 0.9;
    c.t_end = 15.0;
    c.snapshot_times = {0.0, 0.05, 1.5, 15.0};
  } else if (name == "evolution-C") {
    c.model = ModelKind::C;
    c.alpha = 1.0;
    c.beta = 0.9;
    c.initial = InitialSpec{InitialKind::parabola, 0.0, 0.0, {}};
    c.t_end = 3.7;
    c.snapshot_times = {0.0, 0.05, 0.35, 3.7};
  } else if (name == "implicit-C") {
    c.model = ModelKind::C;
    c.alpha = 1.0;
    c.beta = 0.9;
    c.initial = InitialSpec{InitialKind::tabulated, 0.0, 0.0, {}};
    for (int i = 0; i < c.n; ++i) {
      const double x = Grid(c.n).x(i);
      c.initial.table.push_back(std::clamp(-(x - 0.5) * (x - 0.5) + 1.0, 0.01, 0.99));
    }
    c.scheme = Scheme::implicit_entropy;
    c.dt = 1e-3;
    c.observe_every = 10;
    c.t_end = 3.7;
    c.snapshot_times = {0.0, 0.05, 0.35, 3.7};
  } else if (name == "mass1" || name == "mass2") {
    c.model = ModelKind::A;
    c.alpha = 1.0;
    c.beta = 0.9;
    c.initial = InitialSpec{name == "mass1" ? InitialKind::mass1 : InitialKind::mass2, 0.0, 0.0, {}};
    c.t_end = 10.0;
    c.snapshot_times = {0.0, 0.05, 0.5, 10.0};
  } else {
    config_error(fmt::format("unknown preset '{}'", name));
  }
  return c;
}

RunConfig coarsen(RunConfig config) {
  config.n = 100;
  if (config.scheme == Scheme::explicit_euler) {
    config.dt = 2e-5;
    config.observe_every = std::max(1, config.observe_every / 4);
  }
  if (config.initial.kind == InitialKind::tabulated && config.potential != PotentialKind::tabulated) {
    std::vector<double> table;
    const Grid coarse(config.n);
    const Grid fine(static_cast<int>(config.initial.table.size()));
    for (int i = 0; i < coarse.size(); ++i) {
      // Linear interpolation of the nodal table onto the coarse grid.
      const double pos = coarse.x(i) / fine.dx();
      const int j = std::min(static_cast<int>(pos), fine.size() - 2);
      const double w = pos - j;
      table.push_back((1.0 - w) * config.initial.table[static_cast<std::size_t>(j)] +
                      w * config.initial.table[static_cast<std::size_t>(j + 1)]);
    }
    config.initial.table = std::move(table);
  }
  return config;
}

int sweep_threads() {
  if (const char* env = std::getenv("FOKKER_FLUX_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> gamma_sweep(const RunConfig& base, std::vector<double> gammas,
                                  const std::optional<std::string>& csv_path, int threads) {
  if (base.model != ModelKind::A) config_error("gamma sweep requires a model A configuration");
  for (double g : gammas) {
    if (!std::isfinite(g)) config_error("gamma values must be finite");
  }
  std::sort(gammas.begin(), gammas.end());
  const std::size_t count = gammas.size();
  std::vector<std::optional<RateReport>> fits(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t k = next++; k < count && !failed; k = next++) {
      try {
        RunConfig c = base;
        c.gamma = gammas[k];
        if (c.potential == PotentialKind::zero) c.potential = PotentialKind::scaled_linear;
        RunResult r = simulate(c);
        if (!r.summary.fit) throw Error(ErrorCode::fit, fmt::format("gamma = {}: {}", gammas[k], r.summary.fit_error));
        fits[k] = *r.summary.fit;
      } catch (...) {
        errors[k] = std::current_exception();
        failed = true;
      }
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < count; ++k) {
    if (fits[k]) rows.push_back(SweepRow{gammas[k], *fits[k]});
  }
  if (csv_path) {
    Column g{"gamma", {}}, slope{"fitted_slope", {}}, r2{"r_squared", {}};
    for (const auto& row : rows) {
      g.values.push_back(row.gamma);
      slope.values.push_back(row.fit.fitted_slope);
      r2.values.push_back(row.fit.r_squared);
    }
    const auto parent = std::filesystem::path(*csv_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    write_csv(*csv_path, {g, slope, r2});
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

MassReport mass_evolution(const std::string& which, const std::optional<std::string>& out_dir) {
  if (which != "mass1" && which != "mass2") config_error(fmt::format("unknown mass preset '{}'", which));
  RunConfig c = preset(which);
  if (out_dir) {
    c.outputs = *out_dir;
    return run(c).summary.mass;
  }
  return simulate(c).summary.mass;
}

}  // namespace fokker_flux
