#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boxanneal/dynamics.hpp"
#include "boxanneal/hamiltonian.hpp"
#include "boxanneal/potential.hpp"

namespace boxanneal::app {

/// Flat key=value settings. Keys carry a section prefix ("potential.mu");
/// a "[section]" line in a file prefixes the keys that follow it.
using Settings = std::map<std::string, std::string>;

/// Every accepted key with its default value.
const Settings& default_settings();

/// Parses a config file; throws DomainError on malformed lines and
/// std::ios_base::failure when the file cannot be read.
Settings read_settings(const std::filesystem::path& path);
Settings parse_settings(const std::string& text, const std::string& origin = "<text>");

/// Overlays `over` onto `base`; unknown keys throw DomainError.
void merge_settings(Settings& base, const Settings& over);

/// Directory holding the bundled presets: $BOXANNEAL_EXPERIMENTS_DIR if set,
/// otherwise the source tree's experiments/ folder.
std::filesystem::path experiments_dir();
std::filesystem::path preset_path(const std::string& name);

/// Reads numbers in the usual forms plus "1e4.5" for 10^4.5.
double parse_number(const std::string& text, const std::string& key);
int parse_int(const std::string& text, const std::string& key);
bool parse_bool(const std::string& text, const std::string& key);

/// "log:min:max:count" (log10 spaced), "lin:min:max:count" or a comma list.
std::vector<double> parse_grid(const std::string& text, const std::string& key);

enum class Format { csv, json };

struct ExperimentConfig {
  BoxPotential potential;
  RastriginPotential rastrigin;
  BasisSpec basis;
  Schedule schedule;
  std::vector<double> T_list;
  ReferenceSpec reference;
  IntegratorOptions integrator;
  bool by_speed = false;

  double s = 1e4;
  std::vector<double> s_grid;
  int levels = 4;
  int points = 1001;
  std::string density_source = "eigen";

  double closure_tol = 1e-6;
  double flat_slope = 0.02;

  std::vector<double> m_grid;
  double log_m_lo = 2.5;
  double log_m_hi = 4.0;
  double embed_L = 6.0;
  int embed_ndim = 400;

  double lz_gamma = 0.0;
  double lz_v = 1.0;
  int well = 1;  // m of the flat-gap formula

  std::string out;  // empty: stdout
  Format format = Format::csv;
  bool plot = false;
  int jobs = 1;
};

/// Builds and validates the typed configuration. Throws DomainError with the
/// offending key on any invalid value.
ExperimentConfig build_config(const Settings& s);

/// Canonical text "key=value\n" in key order; hashed into the manifest.
std::string canonical_text(const Settings& s);

}  // namespace boxanneal::app
