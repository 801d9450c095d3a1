// leray-lab: constants tables, inequality sweeps, simulations and Duhamel checks.

#include "leray_lab/leray_lab.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace leray_lab;

namespace {

enum Exit : int { ok = 0, usage = 1, quadrature = 2, violation = 3, instability = 4, config = 5 };

struct Common {
  std::string json;
  std::optional<std::uint64_t> seed;
  std::string preset = "computed";
  std::optional<double> tol;
};

GammaPreset parse_preset(const std::string& s) {
  return s == "paper" ? GammaPreset::published : GammaPreset::computed;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  write_text(path, j.dump(2) + "\n");
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

int cmd_constants(const Common& opt) {
  const BoundReport r = make_bound_report(parse_preset(opt.preset));
  std::printf("preset                     %s\n", r.preset.c_str());
  std::printf("Gamma_3                    %s\n", format_g12(r.gamma3).c_str());
  std::printf("Gamma_4                    %s\n", format_g12(r.gamma4).c_str());
  std::printf("K_3 = Gamma_3^12 / 2       %s\n", format_g12(r.k3).c_str());
  std::printf("K_4 = Gamma_4^6 / 2        %s\n", format_g12(r.k4).c_str());
  std::printf("classical K_3 = 1/(128pi^2) %s\n", format_g12(r.classical_k3).c_str());
  std::printf("improvement ratio          %s\n", format_g12(r.improvement_ratio).c_str());
  write_json(opt.json, to_json(r));
  return Exit::ok;
}

int cmd_scan(const Common& opt, int dim, std::size_t count, int resolution, bool radial) {
  ScanOptions so;
  so.dim = dim;
  so.count = count;
  so.seed = opt.seed.value_or(7);
  so.resolution = resolution;
  so.radial = radial;
  so.gammas = preset_constants(parse_preset(opt.preset));
  if (opt.tol) so.tol.box = *opt.tol;
  const ScanSummary s = inequality_scan(so);
  std::printf("dim %d  fields %zu  seed %llu  resolution %d\n", s.dim, s.count,
              static_cast<unsigned long long>(s.seed), s.resolution);
  std::printf("%-7s %-26s %9s %7s %7s  %-16s %s\n", "corpus", "inequality", "evaluated", "passed",
              "failed", "worst ratio", "worst field");
  for (const auto& r : s.rows)
    std::printf("%-7s %-26s %9zu %7zu %7zu  %-16s %s%s\n", r.corpus.c_str(), r.name.c_str(),
                r.evaluated, r.passed, r.failed(), format_g12(r.worst_ratio).c_str(),
                r.worst_field.c_str(), r.diagnostic ? "  [diagnostic]" : "");
  write_json(opt.json, to_json(s));
  return s.all_passed() ? Exit::ok : Exit::violation;
}

int cmd_simulate(const Common& opt, const std::string& config_path, const std::string& out_dir,
                 const std::string& invocation) {
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json raw;
  SolverConfig cfg = load_config(config_path, &raw);
  if (opt.seed) {
    cfg.initial.seed = *opt.seed;
    raw["initial"]["seed"] = *opt.seed;
  }
  cfg.gammas = preset_constants(parse_preset(opt.preset));
  const SimulationResult result = simulate(cfg);

  fs::create_directories(out_dir);
  const std::string stem = fs::path(config_path).stem().string();
  const std::string csv_name = stem + ".series.csv";
  const std::string manifest_name = stem + ".manifest.json";
  const fs::path dir(out_dir);
  RunManifest m;
  m.command = invocation;
  m.config_hash = config_hash(raw);
  m.seed = cfg.initial.seed;
  m.outputs.push_back((dir / csv_name).string());
  write_text((dir / csv_name).string(), series_csv(result.series, manifest_name));
  if (!result.trajectory.snapshots.empty()) {
    const std::string traj = (dir / (stem + ".trajectory.bin")).string();
    write_trajectory(traj, result.trajectory);
    m.outputs.push_back(traj);
  }
  const CriterionTrace trace = criterion_trace(result.series, cfg.nu, 3, cfg.gammas);
  nlohmann::json onsets = nlohmann::json::object();
  for (int k = 1; k <= cfg.m_max; ++k) {
    const auto o = monotone_onset(result.series, k);
    onsets["m" + std::to_string(k)] = o ? nlohmann::json(*o) : nlohmann::json(nullptr);
  }
  m.extra = {{"steps", result.steps},
             {"max_divergence_defect", result.max_divergence_defect},
             {"worst_energy_increase", result.worst_energy_increase},
             {"max_grid_reynolds", result.max_grid_reynolds},
             {"warnings", result.warnings},
             {"monotone_onset", onsets},
             {"criterion_first_true", trace.first_true ? nlohmann::json(*trace.first_true) : nlohmann::json(nullptr)},
             {"criterion_reverted", trace.reverted},
             {"criterion_illustrative", cfg.grid.dim() != 3}};
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.outputs.push_back((dir / manifest_name).string());
  write_json((dir / manifest_name).string(), m.to_json());
  write_json(opt.json, m.to_json());

  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const auto& last = result.series.samples.back();
  std::printf("steps %zu  t %s  |u| %s  |Du| %s  energy residual %s\n", result.steps,
              format_g12(last.t).c_str(), format_g12(last.l2).c_str(),
              format_g12(last.dl2[0]).c_str(), format_g12(last.residual).c_str());
  std::printf("criterion%s first true at %s, reverted: %s\n",
              cfg.grid.dim() == 3 ? "" : " (n = 3 formula, illustration)",
              trace.first_true ? format_g12(*trace.first_true).c_str() : "never",
              trace.reverted ? "yes" : "no");
  for (int k = 1; k <= cfg.m_max; ++k) {
    const auto o = monotone_onset(result.series, k);
    std::printf("monotone onset m=%d: %s\n", k, o ? format_g12(*o).c_str() : "none");
  }
  for (const auto& p : m.outputs) std::printf("wrote %s\n", p.c_str());
  return Exit::ok;
}

int cmd_verify_duhamel(const Common& opt, const std::string& path, double t0, double t, int stride) {
  if (!(t0 < t)) throw ConfigError("verify-duhamel needs t0 < t");
  const TrajectoryStore traj = read_trajectory(path);
  const double r = duhamel_residual(traj, t0, t, stride);
  std::printf("duhamel residual on [%s, %s] (stride %d): %s\n", format_g12(t0).c_str(),
              format_g12(t).c_str(), stride, format_g12(r).c_str());
  write_json(opt.json, {{"schema", "leray_lab.duhamel/1"},
                        {"trajectory", path},
                        {"t0", t0},
                        {"t", t},
                        {"stride", stride},
                        {"residual", r},
                        {"threshold", opt.tol ? nlohmann::json(*opt.tol) : nlohmann::json(nullptr)}});
  if (opt.tol && r > *opt.tol) return Exit::violation;
  return Exit::ok;
}

void add_common(CLI::App* sub, Common& c, bool seed, bool preset, bool tol, const char* tol_help) {
  sub->add_option("--json", c.json, "Write a JSON report to PATH");
  if (seed) sub->add_option("--seed", c.seed, "Random seed");
  if (preset)
    sub->add_option("--preset", c.preset, "Gagliardo-Nirenberg constants")
        ->check(CLI::IsMember({"computed", "paper"}));
  if (tol) sub->add_option("--tol", c.tol, tol_help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for regularity-time bounds of Leray solutions"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common common;

  auto* constants = app.add_subcommand("constants", "Gagliardo-Nirenberg and regularity-time constants");
  add_common(constants, common, false, true, false, "");

  int dim = 3;
  std::size_t count = 100;
  int resolution = 0;
  bool no_radial = false;
  auto* scan = app.add_subcommand("inequality-scan", "Sweep every inequality over a random corpus");
  add_common(scan, common, true, true, true, "Box-corpus relative tolerance");
  scan->add_option("--dim", dim, "Dimension (3 or 4)")->check(CLI::IsMember({3, 4}));
  scan->add_option("--count", count, "Fields per corpus");
  scan->add_option("--resolution", resolution, "Grid points per axis (0 = default)");
  scan->add_flag("--no-radial", no_radial, "Skip the radial corpus");

  std::string config_path;
  std::string out_dir = ".";
  auto* sim = app.add_subcommand("simulate", "Run a pseudo-spectral simulation from a JSON config");
  add_common(sim, common, true, true, false, "");
  sim->add_option("config", config_path, "Config file")->required();
  sim->add_option("--out", out_dir, "Output directory");

  std::string traj_path;
  double t0 = 0.0;
  double t1 = 0.0;
  int stride = 1;
  auto* duh = app.add_subcommand("verify-duhamel", "Check the Duhamel identity on a trajectory file");
  add_common(duh, common, false, false, true, "Fail (exit 3) when the residual exceeds X");
  duh->add_option("trajectory", traj_path, "Trajectory file")->required();
  duh->add_option("--t0", t0, "Start time")->required();
  duh->add_option("--t", t1, "End time")->required();
  duh->add_option("--stride", stride, "Use every stride-th snapshot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Exit::ok : Exit::usage;
  }

  try {
    if (*constants) return cmd_constants(common);
    if (*scan) return cmd_scan(common, dim, count, resolution, !no_radial);
    if (*sim) return cmd_simulate(common, config_path, out_dir, command_line(argc, argv));
    if (*duh) return cmd_verify_duhamel(common, traj_path, t0, t1, stride);
  } catch (const QuadratureError& e) {
    std::fprintf(stderr, "quadrature failure: %s\n", e.what());
    return Exit::quadrature;
  } catch (const InstabilityError& e) {
    std::fprintf(stderr, "instability: %s\n", e.what());
    return Exit::instability;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::config;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return Exit::usage;
  }
  return Exit::usage;
}
