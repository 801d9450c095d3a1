#pragma once

#include "leray_lab/bounds.hpp"
#include "leray_lab/diagnostics.hpp"
#include "leray_lab/scan.hpp"
#include "leray_lab/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace leray_lab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kConfigSchema = "leray_lab.simulate/1";

/// %.17g, the round-trip format used in CSV and JSON artifacts.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// %.12g for human-facing tables.
inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(path + "." + it.key() + ": unknown key");
}

template <typename T>
T field_or(const nlohmann::json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

template <typename T>
T field_required(const nlohmann::json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key + ": missing required key");
  return field_or<T>(obj, path, key, T{});
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Parses a simulate config. Unknown keys, wrong types and invalid values all
/// raise ConfigError naming the offending field path.
inline SolverConfig parse_config(const nlohmann::json& j) {
  using detail::field_or;
  using detail::field_required;
  detail::reject_unknown(j, "$", {"schema", "grid", "nu", "t_end", "time_step", "initial",
                                  "sample_interval", "m_max", "nonlinear", "snapshots"});
  const auto schema = field_required<std::string>(j, "$", "schema");
  if (schema != kConfigSchema)
    throw ConfigError("$.schema: expected \"" + std::string(kConfigSchema) + "\", got \"" + schema + "\"");

  SolverConfig c;
  if (!j.contains("grid")) throw ConfigError("$.grid: missing required key");
  const auto& gj = j.at("grid");
  detail::reject_unknown(gj, "$.grid", {"dim", "resolution", "box_length", "dealias_fraction"});
  try {
    c.grid = make_grid(field_required<int>(gj, "$.grid", "dim"),
                       field_required<int>(gj, "$.grid", "resolution"),
                       field_or<double>(gj, "$.grid", "box_length", 2.0 * std::numbers::pi),
                       field_or<double>(gj, "$.grid", "dealias_fraction", 2.0 / 3.0));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("$.grid: ") + e.what());
  }
  c.nu = field_required<double>(j, "$", "nu");
  c.t_end = field_required<double>(j, "$", "t_end");
  c.sample_interval = field_or<double>(j, "$", "sample_interval", c.sample_interval);
  c.m_max = field_or<int>(j, "$", "m_max", c.m_max);
  c.nonlinear = field_or<bool>(j, "$", "nonlinear", c.nonlinear);

  if (j.contains("time_step")) {
    const auto& tj = j.at("time_step");
    detail::reject_unknown(tj, "$.time_step", {"dt", "cfl", "viscous_safety"});
    c.dt = field_or<double>(tj, "$.time_step", "dt", c.dt);
    c.cfl = field_or<double>(tj, "$.time_step", "cfl", c.cfl);
    c.viscous_safety = field_or<double>(tj, "$.time_step", "viscous_safety", c.viscous_safety);
  }
  if (j.contains("initial")) {
    const auto& ij = j.at("initial");
    detail::reject_unknown(ij, "$.initial",
                           {"kind", "seed", "energy", "peak_k", "amplitude", "perturbation", "path"});
    const auto kind = field_required<std::string>(ij, "$.initial", "kind");
    if (kind == "zero") c.initial.kind = InitialKind::zero;
    else if (kind == "taylor_green") c.initial.kind = InitialKind::taylor_green;
    else if (kind == "random_spectrum") c.initial.kind = InitialKind::random_spectrum;
    else if (kind == "file") c.initial.kind = InitialKind::file;
    else throw ConfigError("$.initial.kind: unknown initial condition \"" + kind + "\"");
    c.initial.seed = field_or<std::uint64_t>(ij, "$.initial", "seed", c.initial.seed);
    c.initial.energy = field_or<double>(ij, "$.initial", "energy", c.initial.energy);
    c.initial.peak_k = field_or<double>(ij, "$.initial", "peak_k", c.initial.peak_k);
    c.initial.amplitude = field_or<double>(ij, "$.initial", "amplitude", c.initial.amplitude);
    c.initial.perturbation = field_or<double>(ij, "$.initial", "perturbation", c.initial.perturbation);
    c.initial.path = field_or<std::string>(ij, "$.initial", "path", c.initial.path);
    if (c.initial.kind == InitialKind::file && c.initial.path.empty())
      throw ConfigError("$.initial.path: required for kind \"file\"");
  }
  if (j.contains("snapshots")) {
    const auto& sj = j.at("snapshots");
    detail::reject_unknown(sj, "$.snapshots", {"t_start", "t_stop", "count"});
    c.snapshots = SnapshotSchedule{field_required<double>(sj, "$.snapshots", "t_start"),
                                   field_required<double>(sj, "$.snapshots", "t_stop"),
                                   field_required<int>(sj, "$.snapshots", "count")};
  }
  validate(c);
  return c;
}

/// Reads and parses a config file; syntax errors report line and column.
inline SolverConfig load_config(const std::string& path, nlohmann::json* raw = nullptr) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": malformed JSON");
  }
  if (raw) *raw = j;
  return parse_config(j);
}

/// CSV with columns t, l2, dl2_1..dl2_m, residual, criterion, sqrt_t_dl2.
inline std::string series_csv(const DiagnosticsSeries& series, const std::string& manifest_ref) {
  std::string out;
  if (!manifest_ref.empty()) out += "# manifest=" + manifest_ref + "\n";
  out += "t,l2";
  for (int m = 1; m <= series.m_max; ++m) out += ",dl2_" + std::to_string(m);
  out += ",residual,criterion,sqrt_t_dl2\n";
  for (const auto& s : series.samples) {
    out += format_g17(s.t) + "," + format_g17(s.l2);
    for (double v : s.dl2) out += "," + format_g17(v);
    out += "," + format_g17(s.residual) + "," + (s.criterion ? "1" : "0") + "," +
           format_g17(s.sqrt_t_dl2) + "\n";
  }
  return out;
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  double wall_time_seconds = 0.0;
  std::vector<std::string> outputs;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j = {{"command", command},       {"config_hash", config_hash},
                        {"seed", seed},             {"version", version},
                        {"wall_time_seconds", wall_time_seconds}, {"outputs", outputs}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
  }
};

/// Hash of the canonical (sorted-key, compact) JSON dump.
inline std::string config_hash(const nlohmann::json& j) { return hex64(fnv1a(j.dump())); }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << text;
  if (!os) throw std::runtime_error("failed writing output file: " + path);
}

inline nlohmann::json to_json(const BoundReport& r) {
  return {{"schema", "leray_lab.constants/1"},
          {"preset", r.preset},
          {"gamma3", r.gamma3},
          {"gamma4", r.gamma4},
          {"k3", r.k3},
          {"k4", r.k4},
          {"classical_k3", r.classical_k3},
          {"improvement_ratio", r.improvement_ratio},
          {"nu", r.nu},
          {"l2_u0", r.l2_u0},
          {"t_star_bound_3d", r.t_star_bound_3d},
          {"t_star_bound_4d", r.t_star_bound_4d},
          {"classical_t_star_bound_3d", r.classical_t_star_bound_3d}};
}

inline nlohmann::json to_json(const ScanSummary& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"name", r.name},
                    {"corpus", r.corpus},
                    {"tolerance", r.tolerance},
                    {"evaluated", r.evaluated},
                    {"passed", r.passed},
                    {"failed", r.failed()},
                    {"worst_ratio", r.worst_ratio},
                    {"worst_field", r.worst_field},
                    {"diagnostic", r.diagnostic}});
  return {{"schema", "leray_lab.inequality_scan/1"},
          {"dim", s.dim},
          {"count", s.count},
          {"seed", s.seed},
          {"resolution", s.resolution},
          {"all_passed", s.all_passed()},
          {"rows", rows}};
}

}  // namespace leray_lab
