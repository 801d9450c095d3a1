#include "leray_lab/leray_lab.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(LERAY_LAB_CLI) + " " + args + " 2>&1";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(LERAY_LAB_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("leray_lab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream os(dir_ / name);
    os << text;
  }
  fs::path dir_;
};

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header && header->empty()) {
      *header = line;
      continue;
    }
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_F(Cli, ConstantsTableAndJson) {
  const Outcome r = run("constants --json " + path("c.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("K_3"), std::string::npos);
  EXPECT_NE(r.out.find("0.00079157174"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(path("c.json")));
  EXPECT_EQ(j["schema"], "leray_lab.constants/1");
  EXPECT_EQ(j["preset"], "computed");
  EXPECT_LE(j["k3"].get<double>(), 0.000464504284);
  EXPECT_LT(j["k3"].get<double>(), j["classical_k3"].get<double>());
  for (const char* key : {"gamma3", "gamma4", "k4", "improvement_ratio", "t_star_bound_3d"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(Cli, ConstantsPublishedPreset) {
  const Outcome r = run("constants --preset paper --json " + path("p.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(path("p.json")));
  EXPECT_EQ(j["gamma3"].get<double>(), 0.558901115737);
  EXPECT_EQ(j["gamma4"].get<double>(), 0.419577519172);
  EXPECT_EQ(run("constants --preset other").code, 1);
}

TEST_F(Cli, InequalityScanBoxCorpus3d) {
  const Outcome r = run("inequality-scan --dim 3 --count 10 --seed 7 --no-radial --json " + path("s.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(path("s.json")));
  EXPECT_TRUE(j["all_passed"].get<bool>());
  for (const auto& row : j["rows"]) {
    if (row["diagnostic"].get<bool>()) continue;
    EXPECT_EQ(row["failed"].get<int>(), 0) << row["name"];
    if (row["name"] != "interp_single_mode" && row["name"] != "|w|_2==|Du|_2") {
      EXPECT_LE(row["worst_ratio"].get<double>(), 1.0) << row["name"];
    }
  }
}

TEST_F(Cli, InequalityScan4d) {
  const Outcome r = run("inequality-scan --dim 4 --count 6 --resolution 8 --json " + path("s.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(path("s.json")));
  EXPECT_EQ(j["dim"], 4);
  EXPECT_TRUE(j["all_passed"].get<bool>());
}

TEST_F(Cli, InequalityScanEmptyCorpus) {
  const Outcome r = run("inequality-scan --count 0 --json " + path("s.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(nlohmann::json::parse(slurp(path("s.json")))["rows"].empty());
}

TEST_F(Cli, InequalityScanViolationExitsThree) {
  // A tolerance below -1 makes every box inequality fail.
  EXPECT_EQ(run("inequality-scan --count 2 --resolution 8 --no-radial --tol -2").code, 3);
}

TEST_F(Cli, SimulateTaylorGreen) {
  const Outcome r = run("simulate " + config("taylor-green.json") + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(dir_ / "taylor-green.series.csv");
  EXPECT_EQ(csv.rfind("# manifest=taylor-green.manifest.json\n", 0), 0u);
  std::string header;
  const auto rows = csv_rows(csv, &header);
  EXPECT_EQ(header, "t,l2,dl2_1,dl2_2,dl2_3,residual,criterion,sqrt_t_dl2");
  ASSERT_EQ(rows.size(), 101u);
  for (const auto& row : rows) EXPECT_NEAR(row[1] / rows[0][1], std::exp(-0.2 * row[0]), 1e-6);
  const auto m = nlohmann::json::parse(slurp(dir_ / "taylor-green.manifest.json"));
  for (const char* key : {"command", "config_hash", "seed", "version", "wall_time_seconds", "outputs"})
    EXPECT_TRUE(m.contains(key)) << key;
  EXPECT_EQ(m["version"], leray_lab::kVersion);
  EXPECT_TRUE(m["criterion_illustrative"].get<bool>());
}

TEST_F(Cli, SimulateIsDeterministic) {
  ASSERT_EQ(run("simulate " + config("heat-linear.json") + " --out " + path("a")).code, 0);
  ASSERT_EQ(run("simulate " + config("heat-linear.json") + " --out " + path("b")).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "heat-linear.series.csv"), slurp(dir_ / "b" / "heat-linear.series.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "heat-linear.trajectory.bin"),
            slurp(dir_ / "b" / "heat-linear.trajectory.bin"));
  ASSERT_EQ(run("simulate " + config("heat-linear.json") + " --seed 6 --out " + path("c")).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "heat-linear.series.csv"), slurp(dir_ / "c" / "heat-linear.series.csv"));
}

TEST_F(Cli, MalformedConfigReportsLocation) {
  write("bad.json", "{\n  \"schema\": \"leray_lab.simulate/1\",\n  \"nu\": ,\n}\n");
  const Outcome r = run("simulate " + path("bad.json") + " --out " + dir_.string());
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.out.find("bad.json:3:"), std::string::npos) << r.out;
}

TEST_F(Cli, UnknownKeyReportsPath) {
  write("extra.json",
        R"({"schema": "leray_lab.simulate/1", "grid": {"dim": 2, "resolution": 16, "colour": 1},
            "nu": 0.1, "t_end": 0.1})");
  const Outcome r = run("simulate " + path("extra.json"));
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.out.find("$.grid.colour"), std::string::npos) << r.out;
  write("neg.json", R"({"schema": "leray_lab.simulate/1", "grid": {"dim": 2, "resolution": 16}, "nu": -1, "t_end": 1})");
  EXPECT_EQ(run("simulate " + path("neg.json")).code, 5);
  EXPECT_EQ(run("simulate " + path("missing.json")).code, 5);
}

TEST_F(Cli, InstabilityExitsFour) {
  write("blowup.json",
        R"({"schema": "leray_lab.simulate/1", "grid": {"dim": 2, "resolution": 32}, "nu": 1e-6,
            "t_end": 200, "time_step": {"dt": 2.0}, "sample_interval": 2.0,
            "initial": {"kind": "random_spectrum", "energy": 100, "peak_k": 6}})");
  const Outcome r = run("simulate " + path("blowup.json") + " --out " + dir_.string());
  EXPECT_EQ(r.code, 4) << r.out;
}

TEST_F(Cli, VerifyDuhamelLinearRun) {
  ASSERT_EQ(run("simulate " + config("heat-linear.json") + " --out " + dir_.string()).code, 0);
  const std::string traj = path("heat-linear.trajectory.bin");
  const Outcome r = run("verify-duhamel " + traj + " --t0 0.5 --t 1 --json " + path("d.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_LE(nlohmann::json::parse(slurp(path("d.json")))["residual"].get<double>(), 1e-12);
  EXPECT_EQ(run("verify-duhamel " + traj + " --t0 1 --t 0.5").code, 5);
  EXPECT_EQ(run("verify-duhamel " + path("nope.bin") + " --t0 0.5 --t 1").code, 5);
  {
    std::ofstream os(path("junk.bin"), std::ios::binary);
    os << "LRYTRAJ1garbage";
  }
  EXPECT_EQ(run("verify-duhamel " + path("junk.bin") + " --t0 0.5 --t 1").code, 5);
}

TEST_F(Cli, VerifyDuhamelStandardTrajectory) {
  ASSERT_EQ(run("simulate " + config("taylor-green-perturbed.json") + " --out " + dir_.string()).code, 0);
  const std::string traj = path("taylor-green-perturbed.trajectory.bin");
  const Outcome r = run("verify-duhamel " + traj + " --t0 0.5 --t 1 --stride 2 --tol 1e-6 --json " + path("d.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_LE(nlohmann::json::parse(slurp(path("d.json")))["residual"].get<double>(), 1e-6);
  EXPECT_EQ(run("verify-duhamel " + traj + " --t0 0.5 --t 1 --tol 1e-30").code, 3);
  EXPECT_EQ(run("verify-duhamel " + traj + " --t0 0.5 --t 1 --stride 4").code, 5);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  const Outcome v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(leray_lab::kVersion), std::string::npos);
}
