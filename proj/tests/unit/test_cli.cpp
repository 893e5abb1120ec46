#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "resetsim/cli.hpp"
#include "resetsim/io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using resetsim::cli::run_cli;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name) {
  const auto p = fs::path(RESETSIM_TEST_TMP) / "cli" / name;
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> v;
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

TEST(Cli, ThermalPrintsPopulation) {
  const auto dir = tmp("thermal");
  const auto r = run({"thermal", "--freq", "4.86GHz", "--temp", "41mK", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(r.out.rfind("p_e = ", 0), 0u) << r.out;
  EXPECT_NEAR(std::stod(r.out.substr(6)), 0.34, 0.005) << r.out;
  const auto j = json::parse(resetsim::io::read_text(dir / "thermal.json"));
  EXPECT_NEAR(j["p_e"].get<double>(), 0.0034, 0.0001);
  const auto inv = run({"thermal", "--freq", "4.37GHz", "--pop", "1.35%", "--out", dir.string()});
  EXPECT_EQ(inv.code, 0);
  const auto t = json::parse(resetsim::io::read_text(dir / "thermal.json"));
  EXPECT_NEAR(t["temperature_mk"].get<double>(), 49.0, 1.0);
}

TEST(Cli, NonThermalPopulationIsNumericError) {
  const auto r = run({"thermal", "--freq", "4.37GHz", "--pop", "60%", "--out", tmp("nonthermal").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingConfigNamesPath) {
  const auto dir = tmp("missing");
  const auto r = run({"--config", "/no/such/config.json", "thermal", "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/no/such/config.json"), std::string::npos) << r.err;
  const auto m = json::parse(resetsim::io::read_text(dir / "manifest.json"));
  EXPECT_EQ(m["status"], "config_error");
  EXPECT_EQ(m["exit_code"], 2);
}

TEST(Cli, UnknownConfigKeyIsConfigError) {
  const auto dir = tmp("badkey");
  resetsim::io::write_text(dir / "cfg.json", R"({"schema_version": 1, "sytem": {}})");
  const auto r = run({"--config", (dir / "cfg.json").string(), "thermal", "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("sytem"), std::string::npos) << r.err;
}

TEST(Cli, BadFlagIsUsageError) {
  EXPECT_EQ(run({"sparams", "--bogus"}).code, 2);
  EXPECT_EQ(run({"--format", "pdf", "thermal"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, SparamsBandContract) {
  const auto dir = tmp("sparams");
  const auto r = run({"sparams", "--band", "1:10GHz", "--step", "5MHz", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(dir / "sparams.csv");
  ASSERT_EQ(rows.size(), 1 + 1801u);
  EXPECT_EQ(rows[0], "freq_ghz,s21_db,s11_db");
  EXPECT_EQ(rows[1].substr(0, 2), "1,");
  EXPECT_EQ(rows.back().substr(0, 3), "10,");
  EXPECT_TRUE(fs::exists(dir / "sparams.svg"));
  EXPECT_TRUE(fs::exists(dir / "dissipator.s2p"));
  const auto m = json::parse(resetsim::io::read_text(dir / "manifest.json"));
  EXPECT_EQ(m["status"], "ok");
  bool listed = false;
  for (const auto& o : m["outputs"]) listed |= o["path"] == "sparams.csv";
  EXPECT_TRUE(listed);
  EXPECT_EQ(m["config_fnv1a64"].get<std::string>().size(), 16u);
}

TEST(Cli, FormatFilterLimitsOutputs) {
  const auto dir = tmp("format");
  ASSERT_EQ(run({"--format", "csv", "gamma-map", "--out", dir.string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "gamma_map.csv"));
  EXPECT_FALSE(fs::exists(dir / "gamma_map.svg"));
  EXPECT_FALSE(fs::exists(dir / "gamma_map.json"));
}

TEST(Cli, GammaMapResonantColumnSaturates) {
  const auto dir = tmp("gamma");
  ASSERT_EQ(run({"gamma-map", "--kappa", "15MHz", "--out", dir.string()}).code, 0);
  const auto rows = lines(dir / "gamma_map.csv");
  ASSERT_GT(rows.size(), 1u);
  int checked = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream ss(rows[i]);
    std::string g, d, gamma;
    std::getline(ss, g, ',');
    std::getline(ss, d, ',');
    std::getline(ss, gamma, ',');
    if (std::stod(d) != 0.0) continue;
    if (std::stod(g) >= 3.75) {
      EXPECT_NEAR(std::stod(gamma), 7.5, 1e-9) << rows[i];
      ++checked;
    } else {
      EXPECT_LT(std::stod(gamma), 7.5) << rows[i];
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(Cli, ResetSweepDeterministicAcrossJobs) {
  const auto dir = tmp("sweep");
  resetsim::io::write_text(dir / "cfg.json", R"({"schema_version": 1,
    "sweep": {"plateau": {"start": 0, "stop": "40ns", "step": "10ns"},
              "plateau_freq": {"start": "4.33GHz", "stop": "4.41GHz", "step": "20MHz"}}})");
  const auto cfg = (dir / "cfg.json").string();
  ASSERT_EQ(run({"--config", cfg, "--jobs", "1", "reset-sweep", "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"--config", cfg, "--jobs", "4", "reset-sweep", "--out", (dir / "b").string()}).code, 0);
  const auto a = resetsim::io::read_text(dir / "a" / "reset_sweep.csv");
  EXPECT_EQ(a, resetsim::io::read_text(dir / "b" / "reset_sweep.csv"));
  EXPECT_EQ(lines(dir / "a" / "reset_sweep.csv").size(), 1 + 5 * 5u);
  const auto f = json::parse(resetsim::io::read_text(dir / "a" / "failures.json"));
  EXPECT_TRUE(f["failures"].empty());
}

TEST(Cli, ResetBenchByteIdenticalUnderSeed) {
  const auto dir = tmp("bench");
  const std::vector<std::string> base{"--seed", "17", "reset-bench", "--protocol", "eg"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", (dir / "a").string()});
  b.insert(b.end(), {"--out", (dir / "b").string()});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  for (const char* f : {"reset_bench.json", "shots.csv", "fringe.csv"})
    EXPECT_EQ(resetsim::io::read_text(dir / "a" / f), resetsim::io::read_text(dir / "b" / f)) << f;
  const auto j = json::parse(resetsim::io::read_text(dir / "a" / "reset_bench.json"));
  const double res = j["residuals"]["eg"].get<double>();
  EXPECT_GT(res, 0.0135 - 0.005);
  EXPECT_LT(res, 0.027 + 0.005);
}

TEST(Cli, ConfigNumericFailureIsExit3) {
  const auto dir = tmp("numeric");
  resetsim::io::write_text(dir / "cfg.json", R"({"schema_version": 1, "system": {"bath_temperature": "2K"},
    "sweep": {"plateau": {"start": 0, "stop": "10ns", "step": "10ns"},
              "plateau_freq": {"start": "4.37GHz", "stop": "4.37GHz", "step": "1MHz"}}})");
  const auto r = run({"--config", (dir / "cfg.json").string(), "reset-sweep", "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 3) << r.err;
}

}  // namespace
