#include "app/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

#include "boxanneal/errors.hpp"

#ifndef BOXANNEAL_VERSION
#define BOXANNEAL_VERSION "unknown"
#endif

namespace boxanneal::app {

namespace {

std::string format_cell(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  return v.dump();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  return f;
}

void check_written(std::ostream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw std::ios_base::failure("write to " + path.string() + " failed");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

nlohmann::json to_json(const Artifact& a) {
  nlohmann::json j;
  j["schema"] = a.schema;
  j["columns"] = a.table.columns;
  j["rows"] = a.table.rows;
  for (const auto& [k, v] : a.records.items()) j[k] = v;
  return j;
}

std::vector<std::filesystem::path> write_artifact(const Artifact& a, const std::string& out, bool as_json) {
  if (out.empty()) {
    if (as_json)
      std::cout << to_json(a).dump(2) << '\n';
    else
      write_csv(std::cout, a.table);
    std::cout.flush();
    return {};
  }
  const std::filesystem::path path(out);
  std::vector<std::filesystem::path> written{path};
  {
    auto f = open_for_write(path);
    if (as_json)
      f << to_json(a).dump(2) << '\n';
    else
      write_csv(f, a.table);
    check_written(f, path);
  }
  if (!as_json && !a.records.empty()) {
    std::filesystem::path side = path;
    side.replace_extension(".features.json");
    nlohmann::json j = a.records;
    j["schema"] = a.schema;
    auto f = open_for_write(side);
    f << j.dump(2) << '\n';
    check_written(f, side);
    written.push_back(side);
  }
  return written;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void append_manifest(const std::filesystem::path& dir, const Manifest& m) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.jsonl";
  std::ofstream f(path, std::ios::app | std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path.string());
  nlohmann::json j;
  j["subcommand"] = m.subcommand;
  j["params"] = m.params;
  j["version"] = BOXANNEAL_VERSION;
  j["timestamp"] = utc_timestamp();
  j["config_hash"] = m.config_hash;
  j["outputs"] = nlohmann::json::array();
  for (const auto& p : m.outputs) j["outputs"].push_back(p.string());
  j["status"] = m.status;
  j["exit_code"] = m.exit_code;
  f << j.dump() << '\n';
  check_written(f, path);
}

namespace {

const char* kPreamble = R"py(import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

DATA = %s
OUT = DATA.rsplit(".", 1)[0] + ".png"


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    head, body = rows[0], rows[1:]
    cols = {name: [r[i] for r in body] for i, name in enumerate(head)}
    return head, cols


def num(values):
    return [float(v) for v in values]


head, cols = load(DATA)
fig, ax = plt.subplots(figsize=(6, 4.5))
)py";

const char* kEpilogue = R"py(ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else OUT, dpi=150)
)py";

const std::map<std::string, std::string>& style_bodies() {
  static const std::map<std::string, std::string> bodies = {
      {"residual", R"py(xkey = "v" if "--speed" in sys.argv else "T"
x = num(cols[xkey])
y = num(cols["residual"])
ax.loglog(x, y, "o-", ms=3, label="R")
if GUIDE > 0 and xkey == "T":
    ax.loglog(x, [GUIDE / t ** 2 for t in x], "r--", label="%.5g / T^2" % GUIDE)
ax.set_xlabel(xkey)
ax.set_ylabel("residual energy")
)py"},
      {"spectrum", R"py(s = num(cols["s"])
for name in head[1:]:
    ax.plot(s, num(cols[name]), label=name)
ax.set_xscale("log")
ax.set_xlabel("s")
ax.set_ylabel("energy")
)py"},
      {"gaps", R"py(import json
import os

s = num(cols["s"])
for name in head[1:]:
    ax.loglog(s, [max(g, 1e-16) for g in num(cols[name])], label=name)
side = DATA.rsplit(".", 1)[0] + ".features.json"
if os.path.exists(side):
    for f in json.load(open(side)).get("features", []):
        if f["kind"] == "flat_plateau":
            ax.hlines(f["value"], f["s_lo"], f["s_hi"], colors="k", linestyles=":")
        elif f["kind"] == "closure":
            ax.axvline(f["s_lo"], color="gray", lw=0.8)
ax.set_xlabel("s")
ax.set_ylabel("gap")
)py"},
      {"potential", R"py(ax.plot(num(cols["x"]), num(cols["V"]), label="V(x)")
ax.set_xlabel("x")
ax.set_ylabel("V")
)py"},
      {"density", R"py(ax.plot(num(cols["x"]), num(cols["density"]), label="|psi|^2")
ax.set_xlabel("x")
ax.set_ylabel("density")
)py"},
      {"variational", R"py(import math

branches = {}
for m, b, e in zip(num(cols["m"]), cols["branch"], num(cols["energy"])):
    branches.setdefault(b, ([], []))
    branches[b][0].append(math.log10(m))
    branches[b][1].append(e)
for b, (lm, e) in branches.items():
    ax.plot(lm, e, ".", ms=3, label=b)
ax.set_xlabel("log10 m")
ax.set_ylabel("variational energy")
)py"},
  };
  return bodies;
}

}  // namespace

void emit_plot_script(const std::filesystem::path& data, const std::string& style,
                      const std::filesystem::path& script, double guide) {
  const auto& bodies = style_bodies();
  const auto it = bodies.find(style);
  if (it == bodies.end()) throw DomainError("unknown plot style '" + style + "'");
  if (!std::filesystem::exists(data)) throw std::ios_base::failure("plot data " + data.string() + " does not exist");

  const std::string quoted = nlohmann::json(std::filesystem::absolute(data).string()).dump();
  std::string preamble = kPreamble;
  preamble.replace(preamble.find("%s"), 2, quoted);
  char guide_line[64];
  std::snprintf(guide_line, sizeof guide_line, "GUIDE = %.17g\n", guide);

  auto f = open_for_write(script);
  f << preamble << guide_line << it->second << kEpilogue;
  check_written(f, script);
}

}  // namespace boxanneal::app
