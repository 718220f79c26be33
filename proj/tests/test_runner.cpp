// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "floq/runner.hpp"
#include "floq/spectral.hpp"
#include "floq/transport.hpp"
#include "json.hpp"

using namespace floq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

/// from_json must reject `j` with a message mentioning `needle`.
void expect_rejected(const json& j, const std::string& needle) {
  try {
    (void)RunConfig::from_json(j);
    FAIL_CHECK("config accepted but should have been rejected: " << j.dump()
               << " (expected mention of \"" << needle << "\")");
  } catch (const std::exception& e) {
    const std::string what = e.what();
    CHECK_MESSAGE(what.find(needle) != std::string::npos,
                  "error \"" << what << "\" does not mention \"" << needle
                             << "\"");
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE_MESSAGE(bool(f), "missing file: " << p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE_MESSAGE(bool(f), "missing file: " << p.string());
  std::string line;
  std::getline(f, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "floq_runner_tests" / name;
  fs::remove_all(dir);
  return dir;
}
}  // namespace

TEST_CASE("fnv1a64_hex: reference vectors") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("RunConfig::from_json: defaults and field parsing") {
  const RunConfig c = RunConfig::from_json({{"mode", "transport"}});
  CHECK(c.mode == "transport");
  CHECK(c.N == 16);
  CHECK(c.M == 0);
  REQUIRE(c.j_values.size() == 1);
  CHECK(c.j_values[0] == doctest::Approx(1.374));
  REQUIRE(c.jz_values.size() == 1);
  CHECK(c.jz_values[0] == doctest::Approx(kPi));  // default fill
  CHECK(c.n_trajectories == 50);
  CHECK(c.t_max == 100);
  CHECK(c.window_lo == 4.0);
  CHECK(c.window_hi == 40.0);
  CHECK(c.init_state == "gaussian");
  CHECK(c.trace_csv);

  const RunConfig s = RunConfig::from_json({{"mode", "sweep"},
                                            {"J", {0.5, 1.5}},
                                            {"Jz", 2.0},
                                            {"window", {2.0, 30.0}},
                                            {"threads", 3}});
  CHECK(s.j_values == std::vector<double>{0.5, 1.5});
  CHECK(s.jz_values == std::vector<double>{2.0});
  CHECK(s.window_lo == 2.0);
  CHECK(s.window_hi == 30.0);
  CHECK(s.threads == 3);
}

TEST_CASE("RunConfig::from_json: rejections name the offending field") {
  expect_rejected(json::array(), "top level");
  expect_rejected({{"N", 16}}, "'mode'");
  expect_rejected({{"mode", "bogus"}}, "'mode'");
  expect_rejected({{"mode", "transport"}, {"N", 15}}, "'N'");
  expect_rejected({{"mode", "transport"}, {"N", 30}}, "'N'");
  expect_rejected({{"mode", "transport"}, {"N", "16"}}, "'N'");
  expect_rejected({{"mode", "transport"}, {"M", 9}}, "'M'");
  expect_rejected({{"mode", "transport"}, {"J", "big"}}, "'J'");
  expect_rejected({{"mode", "transport"}, {"J", json::array()}}, "'J'");
  expect_rejected({{"mode", "transport"}, {"J", {1.0, 2.0}}}, "transport");
  expect_rejected({{"mode", "transport"}, {"window", {40.0, 4.0}}}, "'window'");
  expect_rejected({{"mode", "transport"}, {"window", {0.0, 10.0}}}, "'window'");
  expect_rejected({{"mode", "transport"}, {"window", {4.0}}}, "'window'");
  expect_rejected({{"mode", "transport"}, {"jp_values", {0.1}}},
                  "unknown key 'jp_values'");
  expect_rejected({{"mode", "transport"}, {"init_state", "bell"}},
                  "'init_state'");
  expect_rejected({{"mode", "transport"}, {"t_max", 0}}, "'t_max'");
  expect_rejected({{"mode", "transport"}, {"n_trajectories", 0}},
                  "'n_trajectories'");
  expect_rejected({{"mode", "transport"}, {"threads", -1}}, "'threads'");
  expect_rejected({{"mode", "transport"}, {"sigma_threshold", -0.5}},
                  "'sigma_threshold'");
  expect_rejected({{"mode", "prethermal"}}, "'J_prime'");
  expect_rejected({{"mode", "prethermal"}, {"J_prime", {0.0, 0.1}}},
                  "'J_prime'");
  expect_rejected({{"mode", "prethermal"}, {"J_prime", {0.1}},
                   {"prethermal_c", -1.0}},
                  "'prethermal_c'");
  expect_rejected({{"mode", "drift"}}, "'n_values'");
  expect_rejected({{"mode", "drift"}, {"n_values", {4, 7}}}, "'n_values'");
  expect_rejected({{"mode", "spectral"}, {"N", 8}, {"cut", 8}}, "'cut'");
  expect_rejected({{"mode", "spectral"}, {"filter_power", 0}},
                  "'filter_power'");
  expect_rejected({{"mode", "spectral"}, {"n_realizations", 0}},
                  "'n_realizations'");
}

TEST_CASE("presets: frozen names, valid, and round-trip stable") {
  const auto p = presets();
  REQUIRE(p.size() == 5);
  for (const char* name : {"regime-points", "j-line-scan", "phase-diagram",
                           "prethermal-sweep", "drift-curve"})
    CHECK(p.count(name) == 1);

  for (const auto& [name, j] : p) {
    const RunConfig c1 = RunConfig::from_json(j);  // must validate
    const json echo1 = c1.to_json();
    const RunConfig c2 = RunConfig::from_json(echo1);
    CHECK(c2.to_json() == echo1);  // canonical echo is a fixed point
  }

  const RunConfig regimes = RunConfig::from_json(p.at("regime-points"));
  CHECK(regimes.mode == "sweep");
  CHECK(regimes.N == 16);
  CHECK(regimes.j_values == std::vector<double>{0.395, 1.374, 2.551, 3.138});
  CHECK(regimes.jz_values == std::vector<double>{kPi});

  const RunConfig drift = RunConfig::from_json(p.at("drift-curve"));
  CHECK(drift.mode == "drift");
  CHECK(drift.n_values == std::vector<int>{8, 10, 12, 14, 16, 20, 24, 28});
}

TEST_CASE("load_config_file: file I/O and parse errors") {
  const fs::path dir = fresh_dir("configs");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "good.json");
    f << R"({"mode": "transport", "N": 6, "t_max": 7})";
  }
  const RunConfig c = load_config_file((dir / "good.json").string());
  CHECK(c.N == 6);
  CHECK(c.t_max == 7);

  {
    std::ofstream f(dir / "bad.json");
    f << "{ not json";
  }
  CHECK_THROWS_WITH_AS(load_config_file((dir / "bad.json").string()),
                       doctest::Contains("parse error"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_config_file((dir / "absent.json").string()),
                       doctest::Contains("cannot open"), std::runtime_error);
}

TEST_CASE("transport mode: outputs, manifest, reruns, and seed contract") {
  const fs::path dir = fresh_dir("transport");
  json j;
  j["mode"] = "transport";
  j["N"] = 6;
  j["M"] = 0;
  j["J"] = 1.2;
  j["Jz"] = 2.0;
  j["n_trajectories"] = 3;
  j["t_max"] = 20;
  j["master_seed"] = 777;
  j["window"] = {2.0, 15.0};
  j["nu_typ"] = 2.0;
  j["threads"] = 2;
  j["output_dir"] = dir.string();
  const RunConfig cfg = RunConfig::from_json(j);

  REQUIRE(floq::run(cfg) == 0);
  for (const char* name : {"trace_0000.csv", "trace_0001.csv", "trace_0002.csv",
                           "trace_mean.csv", "summary.json", "manifest.json"})
    CHECK(fs::exists(dir / name));

  const json manifest = read_json(dir / "manifest.json");
  CHECK(manifest["code_version"] == "floq 0.1.0");
  CHECK(manifest["config"] == cfg.to_json());
  const std::string hash = manifest["config_hash"].get<std::string>();
  CHECK(hash == fnv1a64_hex(cfg.to_json().dump()));
  REQUIRE(hash.size() == 16);
  for (const char c : hash) CHECK(std::isxdigit(static_cast<unsigned char>(c)));
  REQUIRE(manifest["seeds"].size() == 1);
  const json& seeds = manifest["seeds"][0]["trajectory_seeds"];
  REQUIRE(seeds.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(seeds[i].get<std::uint64_t>() ==
          derive_seed(777, 0, static_cast<std::uint64_t>(i)));

  const json summary = read_json(dir / "summary.json");
  CHECK(summary["mode"] == "transport");
  REQUIRE(summary["points"].size() == 1);
  const json& pt = summary["points"][0];
  CHECK(pt["J"].get<double>() == doctest::Approx(1.2));
  CHECK(pt["alpha_sigma"].contains("value"));
  CHECK(pt["alpha_p"].contains("value"));
  CHECK(pt["nu_typ"].get<double>() == 2.0);
  CHECK(pt["nu_bar"].is_number());
  CHECK(pt.contains("t_sigma"));
  CHECK(pt.contains("t_p"));

  // A fresh run over the same directory is byte-identical.
  const std::string manifest_bytes = slurp(dir / "manifest.json");
  const std::string summary_bytes = slurp(dir / "summary.json");
  const std::string trace_bytes = slurp(dir / "trace_0001.csv");
  const std::string mean_bytes = slurp(dir / "trace_mean.csv");
  REQUIRE(floq::run(cfg) == 0);
  CHECK(slurp(dir / "manifest.json") == manifest_bytes);
  CHECK(slurp(dir / "summary.json") == summary_bytes);
  CHECK(slurp(dir / "trace_0001.csv") == trace_bytes);
  CHECK(slurp(dir / "trace_mean.csv") == mean_bytes);

  // The recorded per-trajectory seed reproduces the written trace exactly.
  const TransportTrace solo =
      run_trajectory(6, 0, 1.2, 2.0, seeds[1].get<std::uint64_t>(), 20,
                     InitialStateKind::kGaussian);
  const auto rows = read_csv(dir / "trace_0001.csv");
  REQUIRE(rows.size() == solo.times.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    REQUIRE(rows[k].size() == 6);
    CHECK(rows[k][0] == static_cast<double>(solo.times[k]));
    CHECK(rows[k][1] == solo.sigma[k]);  // %.17g round-trips doubles
    CHECK(rows[k][2] == solo.nu[k]);
    CHECK(rows[k][3] == solo.pmax[k]);
    CHECK(rows[k][4] == solo.R[k].real());
    CHECK(rows[k][5] == solo.R[k].imag());
  }

  // The content hash covers the destination directory.
  json j2 = j;
  j2["output_dir"] = fresh_dir("transport_other").string();
  const RunConfig cfg2 = RunConfig::from_json(j2);
  CHECK(fnv1a64_hex(cfg2.to_json().dump()) != hash);
}

TEST_CASE("transport mode: threshold overrides encode never-crossed as -1") {
  const fs::path dir = fresh_dir("sentinel");
  json j;
  j["mode"] = "transport";
  j["N"] = 6;
  j["J"] = 0.8;
  j["n_trajectories"] = 2;
  j["t_max"] = 10;
  j["master_seed"] = 5;
  j["window"] = {2.0, 9.0};
  j["nu_typ"] = 2.0;
  j["trace_csv"] = false;
  j["sigma_threshold"] = 1000.0;  // unreachable
  j["pmax_threshold"] = 1e-9;     // unreachable
  j["output_dir"] = dir.string();
  REQUIRE(floq::run(RunConfig::from_json(j)) == 0);
  CHECK(!fs::exists(dir / "trace_0000.csv"));

  const json summary = read_json(dir / "summary.json");
  CHECK(summary["points"][0]["t_sigma"].get<double>() == -1.0);
  CHECK(summary["points"][0]["t_p"].get<double>() == -1.0);
}

TEST_CASE("sweep mode: one point per grid entry, failures isolated") {
  const fs::path dir = fresh_dir("sweep");
  json j;
  j["mode"] = "sweep";
  j["N"] = 6;
  j["J"] = {1.0, 2.0};
  j["Jz"] = kPi;
  j["n_trajectories"] = 2;
  j["t_max"] = 10;
  j["master_seed"] = 9;
  j["window"] = {2.0, 9.0};
  j["nu_typ"] = 2.0;
  j["output_dir"] = dir.string();
  REQUIRE(floq::run(RunConfig::from_json(j)) == 0);

  const json manifest = read_json(dir / "manifest.json");
  REQUIRE(manifest["grid"].size() == 2);
  CHECK(manifest["grid"][0]["J"].get<double>() == doctest::Approx(1.0));
  CHECK(manifest["grid"][1]["J"].get<double>() == doctest::Approx(2.0));
  CHECK(fs::exists(dir / "point_0000_mean.csv"));
  CHECK(fs::exists(dir / "point_0001_mean.csv"));

  const json summary = read_json(dir / "summary.json");
  REQUIRE(summary["points"].size() == 2);
  for (int gi = 0; gi < 2; ++gi) {
    CHECK(summary["points"][gi]["grid_index"].get<int>() == gi);
    CHECK(!summary["points"][gi].contains("error"));
  }
}

TEST_CASE("prethermal mode: per-point horizons and the tail-slope fit") {
  const fs::path dir = fresh_dir("prethermal");
  json j;
  j["mode"] = "prethermal";
  j["N"] = 6;
  j["J_prime"] = {0.5, 1.0};
  j["n_trajectories"] = 2;
  j["t_max"] = 350;
  j["master_seed"] = 11;
  j["output_dir"] = dir.string();
  REQUIRE(floq::run(RunConfig::from_json(j)) == 0);

  const json manifest = read_json(dir / "manifest.json");
  REQUIRE(manifest["grid"].size() == 2);
  for (int gi = 0; gi < 2; ++gi) {
    const json& g = manifest["grid"][gi];
    const double jp = g["J_prime"].get<double>();
    CHECK(g["J"].get<double>() == doctest::Approx(kPi - jp));
    CHECK(g["Jz"].get<double>() == doctest::Approx(kPi - jp));
    // Horizon floor: min(t_max, max(300, round(10 jp^-2.6))) = 300 here.
    CHECK(g["t_max"].get<std::int64_t>() == 300);
  }

  const json summary = read_json(dir / "summary.json");
  CHECK(summary["mode"] == "prethermal");
  REQUIRE(summary["points"].size() == 2);
  for (const auto& pt : summary["points"]) {
    CHECK(pt.contains("t_sigma"));
    CHECK(pt.contains("t_p"));
  }
  CHECK(summary.contains("slope_t_p"));
}

TEST_CASE("spectral mode: per-realization records and sector summaries") {
  const fs::path dir = fresh_dir("spectral");
  json j;
  j["mode"] = "spectral";
  j["N"] = 6;
  j["M"] = 0;
  j["J"] = 1.374;
  j["Jz"] = kPi;
  j["n_realizations"] = 2;
  j["n_eigs"] = 5;
  j["master_seed"] = 13;
  j["output_dir"] = dir.string();
  REQUIRE(floq::run(RunConfig::from_json(j)) == 0);

  CHECK(fs::exists(dir / "spectral_p0000_r000.json"));
  CHECK(fs::exists(dir / "spectral_p0000_r001.json"));
  const json real0 = read_json(dir / "spectral_p0000_r000.json");
  CHECK(real0["converged"].get<bool>());
  CHECK(real0["eigenphases"].size() == 5);
  CHECK(real0["residuals"].size() == 5);

  const json summary = read_json(dir / "summary.json");
  const json& pt = summary["points"][0];
  CHECK(pt["cut"].get<int>() == 3);  // default N/2
  CHECK(pt["n_converged"].get<int>() == 2);
  CHECK(pt["page_entropy"].get<double>() ==
        doctest::Approx(page_entropy(8.0, 64.0)).epsilon(1e-15));
  CHECK(pt["entropy_ratio"].get<double>() ==
        doctest::Approx(pt["mean_entropy"].get<double>() /
                        pt["page_entropy"].get<double>()));
  CHECK(pt["mean_r"].get<double>() >= 0.0);
  CHECK(pt["mean_r"].get<double>() <= 1.0);

  // Realization seeds follow the documented third lane.
  const json manifest = read_json(dir / "manifest.json");
  const json& seeds = manifest["seeds"][0]["realization_seeds"];
  REQUIRE(seeds.size() == 2);
  for (int r = 0; r < 2; ++r)
    CHECK(seeds[r].get<std::uint64_t>() ==
          derive_seed(13, 0, static_cast<std::uint64_t>(r)));
}

TEST_CASE("drift mode: exact small-N rows in CSV and summary") {
  const fs::path dir = fresh_dir("drift");
  json j;
  j["mode"] = "drift";
  j["n_values"] = {4, 6};
  j["samples"] = 1000;
  j["master_seed"] = 17;
  j["output_dir"] = dir.string();
  REQUIRE(floq::run(RunConfig::from_json(j)) == 0);

  const auto rows = read_csv(dir / "drift.csv");
  REQUIRE(rows.size() == 2);
  // Exhaustive permutation averages (exact, stderr 0).
  CHECK(rows[0][0] == 4.0);
  CHECK(rows[0][1] == doctest::Approx(2.1593073593073595).epsilon(1e-14));
  CHECK(rows[0][2] == 0.0);
  CHECK(rows[0][3] == 24.0);
  CHECK(rows[0][4] == 1.0);
  CHECK(rows[1][0] == 6.0);
  CHECK(rows[1][1] == doctest::Approx(2.1621680025453434).epsilon(1e-14));
  CHECK(rows[1][3] == 720.0);
  CHECK(rows[1][4] == 1.0);

  const json summary = read_json(dir / "summary.json");
  REQUIRE(summary["points"].size() == 2);
  CHECK(summary["points"][0]["exact"].get<bool>());
  CHECK(summary["points"][0]["mean_drift"].get<double>() ==
        doctest::Approx(2.1593073593073595).epsilon(1e-14));
}
