#include "app/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "boxanneal/dynamics.hpp"
#include "boxanneal/errors.hpp"
#include "boxanneal/oracles.hpp"
#include "boxanneal/parallel.hpp"
#include "boxanneal/spectrum.hpp"
#include "boxanneal/variational.hpp"

namespace boxanneal::app {

using nlohmann::json;

namespace {

int jobs_of(const ExperimentConfig& c) { return c.jobs > 0 ? c.jobs : default_jobs(); }

json feature_json(const GapFeature& f) {
  return {{"kind", to_string(f.kind)}, {"level", f.level}, {"s_lo", f.s_lo}, {"s_hi", f.s_hi}, {"value", f.value}};
}

SpectrumSweep run_sweep(const ExperimentConfig& c) {
  return sweep(c.potential, c.s_grid, c.levels, c.basis, SweepOptions{false, jobs_of(c)});
}

Table curve_table(const ResidualCurve& curve) {
  Table t{{"T", "v", "residual", "norm_drift", "e_ref_level", "e_ref_energy"}, {}};
  for (const auto& p : curve.points)
    t.rows.push_back(json::array({p.T, p.v, p.residual, p.norm_drift, p.e_ref_level, p.e_ref_energy}));
  return t;
}

Table density_table(const Eigen::VectorXcd& c, const BasisSpec& basis, int points) {
  const auto grid = uniform_grid(basis.L, points);
  const Eigen::VectorXcd psi = to_position(c, basis, grid);
  Table t{{"x", "re_psi", "im_psi", "density"}, {}};
  for (int i = 0; i < points; ++i)
    t.rows.push_back(json::array({grid[i], psi[i].real(), psi[i].imag(), std::norm(psi[i])}));
  return t;
}

}  // namespace

Artifact potential_artifact(const ExperimentConfig& c) {
  Artifact a{"boxanneal.potential/1", {{"x", "V"}, {}}, json::object()};
  for (double x : uniform_grid(c.potential.L, c.points))
    a.table.rows.push_back(json::array({x, eval_box(c.potential, x)}));
  json mins = json::array();
  for (const auto& m : minima(c.potential))
    mins.push_back({{"x", m.x}, {"value", m.value}, {"curvature", m.curvature}, {"one_sided", m.one_sided}});
  a.records["minima"] = mins;
  return a;
}

Artifact density_artifact(const ExperimentConfig& c) {
  Artifact a{"boxanneal.density/1", {}, json::object()};
  if (c.density_source == "anneal") {
    Schedule sch = c.schedule;
    const AnnealResult r = integrate(c.potential, sch, c.basis, c.reference, c.integrator);
    a.table = density_table(r.final_state.coefficients(), c.basis, c.points);
    a.records = {{"source", "anneal"}, {"T", sch.T}, {"s", sch.s_f}, {"energy", r.final_energy}};
    return a;
  }
  const ReferenceLevel ref = resolve_reference(c.potential, c.s, c.basis, c.reference);
  const Eigenpairs pairs = eigensolve(build_hamiltonian(c.potential, c.s, c.basis), ref.level + 1);
  const Eigen::VectorXcd v = pairs.vectors.col(ref.level).cast<std::complex<double>>();
  a.table = density_table(v, c.basis, c.points);
  a.records = {{"source", "eigen"}, {"s", c.s}, {"level", ref.level}, {"energy", ref.energy}};
  return a;
}

Artifact spectrum_artifact(const ExperimentConfig& c) {
  const SpectrumSweep sw = run_sweep(c);
  Artifact a{"boxanneal.spectrum/1", {{"s"}, {}}, json::object()};
  for (int k = 0; k < c.levels; ++k) a.table.columns.push_back("E_" + std::to_string(k));
  for (std::size_t i = 0; i < sw.s_grid.size(); ++i) {
    json row = json::array({sw.s_grid[i]});
    for (int k = 0; k < c.levels; ++k) row.push_back(sw.levels(static_cast<Eigen::Index>(i), k));
    a.table.rows.push_back(row);
  }
  return a;
}

Artifact gaps_artifact(const ExperimentConfig& c) {
  if (c.levels < 2) throw DomainError("'spectrum.levels' must be at least 2 for gaps");
  const SpectrumSweep sw = run_sweep(c);
  Artifact a{"boxanneal.gaps/1", {{"s"}, {}}, json::object()};
  std::vector<std::vector<double>> g;
  json features = json::array();
  for (int n = 1; n < c.levels; ++n) {
    a.table.columns.push_back("D_" + std::to_string(n));
    g.push_back(gaps(sw, n));
    if (const auto f = detect_gap_closure(sw, n, c.closure_tol)) features.push_back(feature_json(*f));
    for (const auto& f : detect_flat_gaps(sw, n, c.flat_slope, c.closure_tol)) features.push_back(feature_json(f));
  }
  for (std::size_t i = 0; i < sw.s_grid.size(); ++i) {
    json row = json::array({sw.s_grid[i]});
    for (const auto& col : g) row.push_back(col[i]);
    a.table.rows.push_back(row);
  }
  a.records["features"] = features;
  return a;
}

Artifact anneal_artifact(const ExperimentConfig& c) {
  const AnnealResult r = integrate(c.potential, c.schedule, c.basis, c.reference, c.integrator);
  ResidualCurve curve{c.potential, c.basis, c.schedule, c.reference, {}};
  curve.points.push_back({c.schedule.T, (c.schedule.s_f - c.schedule.s_i) / c.schedule.T, r.residual, r.norm_drift,
                          r.reference.level, r.reference.energy, r.steps});
  Artifact a{"boxanneal.anneal/1", curve_table(curve), json::object()};
  json cps = json::array();
  for (const auto& cp : r.checkpoints)
    cps.push_back({{"t", cp.t}, {"s", cp.s}, {"norm_drift", cp.norm_drift}, {"energy", cp.energy}});
  a.records = {{"final_energy", r.final_energy},
               {"steps", r.steps},
               {"step_control", r.step_control},
               {"richardson_change", r.richardson_change},
               {"error_estimate", r.error_estimate},
               {"checkpoints", cps}};
  return a;
}

Artifact sweep_artifact(const ExperimentConfig& c) {
  ResidualCurve curve = sweep_T(c.potential, c.schedule, c.T_list, c.basis, c.reference, c.integrator, jobs_of(c));
  if (c.by_speed) curve = rescale_to_speed(curve);
  Artifact a{"boxanneal.sweep/1", curve_table(curve), json::object()};
  AdiabaticParams ap{c.potential.mu,      c.potential.a,  c.potential.L, c.basis.mass, c.basis.hbar,
                     c.schedule.s_i, c.schedule.s_f, c.schedule.T};
  a.records["adiabatic_prefactor"] = adiabatic_prefactor(ap);
  if (curve.points.size() >= 2) {
    const auto fit = loglog_fit(curve, c.T_list.front(), c.T_list.back());
    a.records["loglog_fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"points", fit.points}};
  }
  return a;
}

const std::vector<std::string>& oracle_formulas() {
  static const std::vector<std::string> names = {
      "zero_point",        "wall",         "adjacent",     "first_order",       "flat_gap",
      "final_frequency",   "adiabatic_prefactor", "adiabatic_residual", "adiabatic_envelope",
      "residual_from_c2",  "landau_zener", "solution_width"};
  return names;
}

Artifact oracle_artifact(const ExperimentConfig& c, const std::string& formula) {
  const auto& p = c.potential;
  const auto& b = c.basis;
  const AdiabaticParams ap{p.mu, p.a, p.L, b.mass, b.hbar, c.schedule.s_i, c.schedule.s_f, c.schedule.T};
  const json box = {{"mu", p.mu}, {"a", p.a}, {"L", p.L}, {"mass", b.mass}, {"hbar", b.hbar}};
  const json adiabatic = {{"mu", p.mu},      {"a", p.a},     {"L", p.L},
                          {"mass", b.mass},  {"hbar", b.hbar}, {"si", c.schedule.s_i},
                          {"sf", c.schedule.s_f}, {"T", c.schedule.T}};
  json inputs;
  double value = 0.0;
  if (formula == "zero_point") {
    value = zero_point_energy(p.mu, c.s, p.L, b.hbar, b.mass);
    inputs = box;
    inputs["s"] = c.s;
  } else if (formula == "wall") {
    value = wall_energy(p.mu, p.a, c.s, p.L, b.hbar, b.mass);
    inputs = box;
    inputs["s"] = c.s;
  } else if (formula == "adjacent") {
    value = adjacent_energy(p.mu, p.a, c.s, p.L, b.hbar, b.mass);
    inputs = box;
    inputs["s"] = c.s;
  } else if (formula == "first_order") {
    value = first_order_point(p.mu, p.a, p.L, b.hbar, b.mass);
    inputs = box;
  } else if (formula == "flat_gap") {
    value = flat_gap_value(c.well, p.mu, p.a);
    inputs = {{"m", c.well}, {"mu", p.mu}, {"a", p.a}};
  } else if (formula == "final_frequency") {
    value = final_well_frequency(ap);
    inputs = adiabatic;
  } else if (formula == "adiabatic_prefactor") {
    value = adiabatic_prefactor(ap);
    inputs = adiabatic;
  } else if (formula == "adiabatic_residual") {
    value = adiabatic_residual(ap);
    inputs = adiabatic;
  } else if (formula == "adiabatic_envelope") {
    value = adiabatic_residual_envelope(ap);
    inputs = adiabatic;
  } else if (formula == "residual_from_c2") {
    value = residual_from_c2(ap);
    inputs = adiabatic;
  } else if (formula == "landau_zener") {
    value = landau_zener(c.lz_gamma, c.lz_v, b.hbar);
    inputs = {{"gamma", c.lz_gamma}, {"v", c.lz_v}, {"hbar", b.hbar}};
  } else if (formula == "solution_width") {
    value = solution_width(c.rastrigin.k, b.mass, b.hbar);
    inputs = {{"k", c.rastrigin.k}, {"mass", b.mass}, {"hbar", b.hbar}};
  } else {
    throw DomainError("unknown oracle formula '" + formula + "'");
  }
  Artifact a{"boxanneal.oracle/1", {{"formula", "value"}, {json::array({formula, value})}}, json::object()};
  a.records = {{"formula", formula}, {"inputs", inputs}, {"value", value}};
  return a;
}

Artifact variational_artifact(const ExperimentConfig& c) {
  const double hbar = c.basis.hbar;
  const auto tracked = track_branches(c.m_grid, c.rastrigin, hbar);
  Artifact a{"boxanneal.variational/1", {{"m", "branch", "alpha", "x0", "energy"}, {}}, json::object()};
  json gap = json::array();
  for (const auto& pts : tracked) {
    const VariationalPoint* excited = nullptr;
    const VariationalPoint* side = nullptr;
    for (const auto& pt : pts) {
      a.table.rows.push_back(json::array({pt.mass, to_string(pt.kind), pt.alpha, pt.x0, pt.energy}));
      if (pt.kind == Branch::excited_center) excited = &pt;
      if (pt.kind == Branch::local_min) side = &pt;
    }
    if (excited && side) {
      const double m = side->mass;
      gap.push_back({{"m", m},
                     {"gap", side->energy - excited->energy},
                     {"gradient", -hbar * hbar / (4.0 * m * m) * (side->alpha - excited->alpha)}});
    }
  }
  try {
    const double ms = ground_state_transition_mass(c.rastrigin, hbar, c.log_m_lo, c.log_m_hi);
    a.records["transition_mass"] = ms;
    a.records["log10_transition_mass"] = std::log10(ms);
  } catch (const ConvergenceError& e) {
    a.records["transition_mass"] = nullptr;
    a.records["transition_note"] = e.what();
  }
  a.records["gap"] = gap;
  return a;
}

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

// Flags shared by every subcommand; each maps onto one config key.
constexpr FlagSpec kFlags[] = {
    {"--mu", "potential.mu", "number of wells (positive multiple of 4)"},
    {"--a", "potential.a", "envelope amplitude"},
    {"--L", "potential.L", "box length"},
    {"--ndim", "basis.ndim", "number of sine basis functions"},
    {"--mass", "basis.mass", "particle mass"},
    {"--hbar", "basis.hbar", "Planck constant"},
    {"--si", "schedule.si", "initial annealing parameter"},
    {"--sf", "schedule.sf", "final annealing parameter (1e4.5 means 10^4.5)"},
    {"--T", "schedule.T", "annealing time, or a grid for sweep"},
    {"--eref", "schedule.eref", "reference level: auto | index:N"},
    {"--s", "spectrum.s", "annealing parameter for single-s commands"},
    {"--sgrid", "spectrum.sgrid", "s grid: log:min:max:count | lin:min:max:count | list"},
    {"--levels", "spectrum.levels", "number of levels"},
    {"--points", "grid.points", "position grid points"},
    {"--source", "density.source", "density source: eigen | anneal"},
    {"--mgrid", "variational.mgrid", "mass grid for variational"},
    {"--k", "rastrigin.k", "Rastrigin spring constant"},
    {"--h0", "rastrigin.h0", "Rastrigin ripple height"},
    {"--w0", "rastrigin.w0", "Rastrigin ripple period"},
    {"--gamma", "oracle.gamma", "Landau-Zener gap"},
    {"--v", "oracle.v", "Landau-Zener sweep rate"},
    {"--well", "oracle.well", "well index m for flat_gap"},
    {"--out", "output.out", "output path (stdout when omitted)"},
    {"--format", "output.format", "csv | json"},
    {"--jobs", "run.jobs", "worker threads (0 = all cores)"},
};

struct Invocation {
  std::map<std::string, std::string> flags;  // key -> value given on the command line
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::string preset;
  bool plot = false;
  bool by_speed = false;
  std::string formula;
};

void add_common(CLI::App* sub, Invocation& inv) {
  for (const auto& f : kFlags) sub->add_option(f.flag, inv.flags[f.key], f.help);
  sub->add_option("--config", inv.configs, "config file(s), applied in order");
  sub->add_option("--preset", inv.preset, "bundled preset name (see $BOXANNEAL_EXPERIMENTS_DIR)");
  sub->add_option("--set", inv.sets, "override any config key: key=value");
  sub->add_flag("--plot", inv.plot, "also write a matplotlib script next to the output");
}

Settings collect_settings(const Invocation& inv) {
  Settings s = default_settings();
  if (!inv.preset.empty()) merge_settings(s, read_settings(preset_path(inv.preset)));
  for (const auto& path : inv.configs) merge_settings(s, read_settings(path));
  Settings sets;
  for (const auto& kv : inv.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects key=value (got '" + kv + "')");
    sets[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  merge_settings(s, sets);
  Settings flags;
  for (const auto& [k, v] : inv.flags)
    if (!v.empty()) flags[k] = v;
  if (inv.plot) flags["output.plot"] = "true";
  if (inv.by_speed) flags["schedule.by_speed"] = "true";
  merge_settings(s, flags);
  return s;
}

std::string plot_style(const std::string& sub) {
  if (sub == "anneal" || sub == "sweep") return "residual";
  return sub;
}

int exit_code_for(const std::exception_ptr& e, std::string& message) {
  try {
    std::rethrow_exception(e);
  } catch (const DomainError& x) {
    message = x.what();
    return kExitValidation;
  } catch (const CLI::Error& x) {
    message = x.what();
    return kExitValidation;
  } catch (const std::ios_base::failure& x) {
    message = x.what();
    return kExitIO;
  } catch (const std::filesystem::filesystem_error& x) {
    message = x.what();
    return kExitIO;
  } catch (const std::exception& x) {
    message = x.what();
    return kExitNumerical;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Quantum annealing of a particle in a box with a multi-well potential"};
  app.set_version_flag("--version", BOXANNEAL_VERSION);
  app.require_subcommand(1);

  Invocation inv;
  const std::vector<std::pair<const char*, const char*>> subs = {
      {"potential", "tabulate V(x) and list its minima"},
      {"density", "position density of an eigenstate or an annealed state"},
      {"spectrum", "lowest levels of H(s) over an s grid"},
      {"gaps", "gaps E_n - E_0 over an s grid with detected features"},
      {"anneal", "one annealing run and its residual energy"},
      {"sweep", "residual energy curve R(T) or R(v)"},
      {"oracle", "evaluate a closed-form prediction"},
      {"variational", "gaussian variational minima of the Rastrigin landscape"},
  };
  std::map<std::string, CLI::App*> handles;
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, inv);
    handles[name] = sub;
  }
  handles["sweep"]->add_flag("--by-speed", inv.by_speed, "order the curve by speed v = (s_f - s_i) / T");
  handles["oracle"]
      ->add_option("formula", inv.formula, "formula name")
      ->required()
      ->check(CLI::IsMember(oracle_formulas()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  Manifest manifest{sub, json::object(), "", {}, "ok", kExitOk};
  std::string out = inv.flags["output.out"];
  int code = kExitOk;
  std::string message;
  try {
    const Settings settings = collect_settings(inv);
    out = settings.at("output.out");
    manifest.params = settings;
    manifest.config_hash = fnv1a_hex(canonical_text(settings));
    const ExperimentConfig cfg = build_config(settings);

    Artifact artifact;
    if (sub == "potential") artifact = potential_artifact(cfg);
    else if (sub == "density") artifact = density_artifact(cfg);
    else if (sub == "spectrum") artifact = spectrum_artifact(cfg);
    else if (sub == "gaps") artifact = gaps_artifact(cfg);
    else if (sub == "anneal") artifact = anneal_artifact(cfg);
    else if (sub == "sweep") artifact = sweep_artifact(cfg);
    else if (sub == "oracle") artifact = oracle_artifact(cfg, inv.formula);
    else artifact = variational_artifact(cfg);

    manifest.outputs = write_artifact(artifact, cfg.out, cfg.format == Format::json);
    if (cfg.plot) {
      std::filesystem::path script(cfg.out);
      script.replace_extension(".plot.py");
      double guide = 0.0;
      if (artifact.records.contains("adiabatic_prefactor")) guide = artifact.records["adiabatic_prefactor"];
      emit_plot_script(cfg.out, plot_style(sub), script, guide);
      manifest.outputs.push_back(script);
    }
  } catch (...) {
    code = exit_code_for(std::current_exception(), message);
    std::cerr << "boxanneal " << sub << ": " << message << '\n';
    manifest.status = message;
    manifest.exit_code = code;
  }

  if (!out.empty()) {
    try {
      append_manifest(std::filesystem::path(out).parent_path(), manifest);
    } catch (const std::exception& e) {
      std::cerr << "boxanneal: manifest not written: " << e.what() << '\n';
      if (code == kExitOk) code = kExitIO;
    }
  }
  return code;
}

}  // namespace boxanneal::app
