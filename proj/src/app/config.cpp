#include "app/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "boxanneal/errors.hpp"

namespace boxanneal::app {

const Settings& default_settings() {
  static const Settings defaults = {
      {"potential.mu", "8"},
      {"potential.a", "0"},
      {"potential.L", "1"},
      {"rastrigin.k", "1"},
      {"rastrigin.h0", "0.2"},
      {"rastrigin.w0", "0.2"},
      {"basis.ndim", "400"},
      {"basis.mass", "1"},
      {"basis.hbar", "1"},
      {"schedule.si", "1"},
      {"schedule.sf", "1e4"},
      {"schedule.T", "100"},
      {"schedule.eref", "index:0"},
      {"schedule.by_speed", "false"},
      {"integrator.step_control", "0.2"},
      {"integrator.abs_tol", "1e-12"},
      {"integrator.rel_tol", "1e-3"},
      {"integrator.max_refinements", "6"},
      {"integrator.verify", "true"},
      {"integrator.checkpoints", "100"},
      {"integrator.basis_guard", "1e-9"},
      {"spectrum.s", "1e4"},
      {"spectrum.sgrid", "log:0:6:61"},
      {"spectrum.levels", "4"},
      {"grid.points", "1001"},
      {"density.source", "eigen"},
      {"gaps.closure_tol", "1e-6"},
      {"gaps.flat_slope", "0.02"},
      {"variational.mgrid", "log:2.9:4:111"},
      {"variational.log_lo", "2.5"},
      {"variational.log_hi", "4"},
      {"variational.embed_L", "6"},
      {"variational.embed_ndim", "400"},
      {"oracle.gamma", "0"},
      {"oracle.v", "1"},
      {"oracle.well", "1"},
      {"output.out", ""},
      {"output.format", "csv"},
      {"output.plot", "false"},
      {"run.jobs", "0"},
  };
  return defaults;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Settings parse_settings(const std::string& text, const std::string& origin) {
  Settings out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw DomainError(origin + ":" + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings read_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str(), path.string());
}

void merge_settings(Settings& base, const Settings& over) {
  const Settings& known = default_settings();
  for (const auto& [k, v] : over) {
    if (!known.contains(k)) throw DomainError("unknown config key '" + k + "'");
    base[k] = v;
  }
}

std::filesystem::path experiments_dir() {
  if (const char* env = std::getenv("BOXANNEAL_EXPERIMENTS_DIR"); env && *env) return env;
#ifdef BOXANNEAL_DEFAULT_EXPERIMENTS_DIR
  return BOXANNEAL_DEFAULT_EXPERIMENTS_DIR;
#else
  return "experiments";
#endif
}

std::filesystem::path preset_path(const std::string& name) {
  std::filesystem::path p = experiments_dir() / name;
  if (p.extension() != ".cfg") p += ".cfg";
  return p;
}

double parse_number(const std::string& text, const std::string& key) {
  static const std::regex fractional_exponent(R"(^\s*([-+]?[0-9]*\.?[0-9]+)[eE]([-+]?[0-9]*\.[0-9]+)\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, fractional_exponent))
    return std::stod(m[1].str()) * std::pow(10.0, std::stod(m[2].str()));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)) != "")
    throw DomainError("'" + key + "' expects a number (got '" + text + "')");
  return v;
}

int parse_int(const std::string& text, const std::string& key) {
  const double v = parse_number(text, key);
  if (v != std::round(v) || std::abs(v) > 2e9) throw DomainError("'" + key + "' expects an integer (got '" + text + "')");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw DomainError("'" + key + "' expects true or false (got '" + text + "')");
}

std::vector<double> parse_grid(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t.empty()) throw DomainError("'" + key + "' is empty");
  std::vector<std::string> parts;
  const char sep = (t.rfind("log:", 0) == 0 || t.rfind("lin:", 0) == 0) ? ':' : ',';
  std::stringstream ss(t);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(trim(item));

  if (sep == ':') {
    if (parts.size() != 4) throw DomainError("'" + key + "' expects log:min:max:count or lin:min:max:count");
    const double lo = parse_number(parts[1], key);
    const double hi = parse_number(parts[2], key);
    const int n = parse_int(parts[3], key);
    if (n < 1) throw DomainError("'" + key + "' needs a positive point count");
    if (n > 1 && !(hi > lo)) throw DomainError("'" + key + "' needs max > min");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
      const double u = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
      out[i] = parts[0] == "log" ? std::pow(10.0, u) : u;
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_number(p, key));
  return out;
}

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw DomainError("'" + key + "' " + what);
}

}  // namespace

ExperimentConfig build_config(const Settings& raw) {
  Settings s = default_settings();
  merge_settings(s, raw);
  auto num = [&](const char* k) { return parse_number(s.at(k), k); };
  auto integer = [&](const char* k) { return parse_int(s.at(k), k); };
  auto flag = [&](const char* k) { return parse_bool(s.at(k), k); };

  ExperimentConfig c;
  c.potential = {integer("potential.mu"), num("potential.a"), num("potential.L")};
  validate(c.potential);
  c.rastrigin = {num("rastrigin.k"), num("rastrigin.h0"), num("rastrigin.w0")};
  validate(c.rastrigin);
  c.basis = {integer("basis.ndim"), c.potential.L, num("basis.mass"), num("basis.hbar")};
  validate(c.basis);

  c.schedule = {num("schedule.si"), num("schedule.sf"), 1.0};
  c.T_list = parse_grid(s.at("schedule.T"), "schedule.T");
  for (std::size_t i = 0; i < c.T_list.size(); ++i) {
    require(c.T_list[i] > 0.0, "schedule.T", "values must be positive");
    if (i > 0) require(c.T_list[i] > c.T_list[i - 1], "schedule.T", "values must be strictly increasing");
  }
  c.schedule.T = c.T_list.front();
  validate(c.schedule);
  c.reference = parse_reference(s.at("schedule.eref"));
  c.by_speed = flag("schedule.by_speed");

  c.integrator.step_control = num("integrator.step_control");
  c.integrator.abs_tol = num("integrator.abs_tol");
  c.integrator.rel_tol = num("integrator.rel_tol");
  c.integrator.max_refinements = integer("integrator.max_refinements");
  c.integrator.verify = flag("integrator.verify");
  c.integrator.checkpoints = integer("integrator.checkpoints");
  c.integrator.basis_guard = num("integrator.basis_guard");
  require(c.integrator.step_control > 0.0, "integrator.step_control", "must be positive");
  require(c.integrator.abs_tol >= 0.0 && c.integrator.rel_tol >= 0.0, "integrator.abs_tol",
          "tolerances must be non-negative");
  require(c.integrator.max_refinements >= 1, "integrator.max_refinements", "must be at least 1");
  require(c.integrator.checkpoints >= 1, "integrator.checkpoints", "must be at least 1");

  c.s = num("spectrum.s");
  require(c.s > 0.0, "spectrum.s", "must be positive");
  c.s_grid = parse_grid(s.at("spectrum.sgrid"), "spectrum.sgrid");
  for (double v : c.s_grid) require(v > 0.0, "spectrum.sgrid", "values must be positive");
  c.levels = integer("spectrum.levels");
  require(c.levels >= 1 && c.levels <= c.basis.n_dim, "spectrum.levels", "must lie in [1, ndim]");
  c.points = integer("grid.points");
  require(c.points >= 2, "grid.points", "must be at least 2");
  c.density_source = s.at("density.source");
  require(c.density_source == "eigen" || c.density_source == "anneal", "density.source",
          "must be 'eigen' or 'anneal'");

  c.closure_tol = num("gaps.closure_tol");
  c.flat_slope = num("gaps.flat_slope");
  require(c.closure_tol > 0.0, "gaps.closure_tol", "must be positive");
  require(c.flat_slope > 0.0, "gaps.flat_slope", "must be positive");

  c.m_grid = parse_grid(s.at("variational.mgrid"), "variational.mgrid");
  for (std::size_t i = 0; i < c.m_grid.size(); ++i) {
    require(c.m_grid[i] > 0.0, "variational.mgrid", "masses must be positive");
    if (i > 0) require(c.m_grid[i] > c.m_grid[i - 1], "variational.mgrid", "masses must increase");
  }
  c.log_m_lo = num("variational.log_lo");
  c.log_m_hi = num("variational.log_hi");
  require(c.log_m_hi > c.log_m_lo, "variational.log_hi", "must exceed variational.log_lo");
  c.embed_L = num("variational.embed_L");
  c.embed_ndim = integer("variational.embed_ndim");
  require(c.embed_ndim >= 2, "variational.embed_ndim", "must be at least 2");

  c.lz_gamma = num("oracle.gamma");
  c.lz_v = num("oracle.v");
  c.well = integer("oracle.well");

  c.out = s.at("output.out");
  const std::string fmt = s.at("output.format");
  require(fmt == "csv" || fmt == "json", "output.format", "must be csv or json");
  c.format = fmt == "csv" ? Format::csv : Format::json;
  c.plot = flag("output.plot");
  require(!c.plot || !c.out.empty(), "output.plot", "needs an output path (--out)");
  require(!c.plot || c.format == Format::csv, "output.plot", "reads CSV data; use --format csv");
  c.jobs = integer("run.jobs");
  require(c.jobs >= 0, "run.jobs", "must be non-negative (0 = all cores)");
  return c;
}

std::string canonical_text(const Settings& s) {
  std::string out;
  for (const auto& [k, v] : s) out += k + "=" + v + "\n";
  return out;
}

}  // namespace boxanneal::app
