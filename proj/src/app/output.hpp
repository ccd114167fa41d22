#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace boxanneal::app {

/// Rows of numbers or strings under one header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<nlohmann::json> rows;  // each a JSON array, one cell per column
};

/// One command's result: the table plus records that only fit JSON
/// (detected features, fit summaries).
struct Artifact {
  std::string schema;  // "boxanneal.<kind>/<version>"
  Table table;
  nlohmann::json records = nlohmann::json::object();
};

/// Numbers are printed with %.17g so reruns are byte-identical.
void write_csv(std::ostream& out, const Table& t);
nlohmann::json to_json(const Artifact& a);

/// Writes the artifact to `out` (stdout when empty) in the given format.
/// In CSV mode, non-empty records go to a sibling "<stem>.features.json".
/// Returns the files written. Throws std::ios_base::failure on I/O errors.
std::vector<std::filesystem::path> write_artifact(const Artifact& a, const std::string& out, bool as_json);

struct Manifest {
  std::string subcommand;
  nlohmann::json params;
  std::string config_hash;
  std::vector<std::filesystem::path> outputs;
  std::string status;  // "ok" or the error message
  int exit_code = 0;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

/// Appends one JSON line to <dir>/manifest.jsonl.
void append_manifest(const std::filesystem::path& dir, const Manifest& m);

/// Styles: residual, spectrum, gaps, potential, density, variational.
/// Throws DomainError on an unknown style and std::ios_base::failure when
/// the data file is missing. `guide` is the coefficient of the 1/T^2 line
/// drawn by the residual style (ignored otherwise).
void emit_plot_script(const std::filesystem::path& data, const std::string& style,
                      const std::filesystem::path& script, double guide = 0.0);

}  // namespace boxanneal::app
