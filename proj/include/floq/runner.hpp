// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace floq {

inline constexpr const char* kCodeVersion = "floq 0.1.0";

/**
 * Fully-resolved experiment configuration.  All fields have defaults; a
 * config file (flat JSON object) overrides them.  Unknown keys and
 * type mismatches are reported with the offending field name.
 */
struct RunConfig {
  std::string mode;  ///< transport | spectral | drift | prethermal | sweep

  int N = 16;
  int M = 0;
  std::vector<double> j_values = {1.374};   ///< key "J": number or array
  std::vector<double> jz_values;            ///< key "Jz": number or array; default pi
  std::vector<double> jp_values;            ///< key "J_prime" (prethermal grid)
  std::vector<int> n_values;                ///< key "n_values" (drift grid)

  int n_trajectories = 50;
  std::int64_t t_max = 100;
  std::uint64_t master_seed = 1;
  std::string output_dir = "runs/out";
  double window_lo = 4.0;   ///< key "window": [lo, hi]
  double window_hi = 40.0;
  std::string init_state = "gaussian";  ///< or "phase"
  int threads = 0;          ///< 0: hardware concurrency
  bool trace_csv = true;    ///< write per-trajectory CSVs (transport mode)

  // Threshold overrides; 0 means the N-dependent defaults
  // (N/30 + 1.25 and 2.6/N).
  double sigma_threshold = 0.0;
  double pmax_threshold = 0.0;

  // nu_typ policy: > 0 use as-is; == 0 estimate with drift_mc
  // (nu_typ_samples walks); < 0 use the asymptotic value 2.
  double nu_typ = 0.0;
  std::int64_t nu_typ_samples = 200000;

  // Prethermal mode: per-point horizon min(t_max, max(300,
  // round(prethermal_c * J'^-prethermal_exp))).
  double prethermal_c = 10.0;
  double prethermal_exp = 2.6;

  // Spectral mode.
  int n_realizations = 20;
  int n_eigs = 0;        ///< 0: default rule
  int filter_order = 0;  ///< 0: default rule
  int filter_power = 1;
  int cut = 0;           ///< subsystem sites; 0: N/2

  // Drift mode.
  std::int64_t samples = 1000000;        ///< walks per N (N <= 20)
  std::int64_t samples_large = 200000;   ///< walks per N (N > 20)

  /// Parse + validate a flat JSON object.  Throws std::runtime_error with
  /// the offending key on unknown keys or wrong types.
  static RunConfig from_json(const nlohmann::json& j);

  /// Canonical echo of every field (used for the manifest and hashing).
  nlohmann::json to_json() const;
};

/// Built-in experiment recipes: regime-points, j-line-scan, phase-diagram,
/// prethermal-sweep, drift-curve.
std::map<std::string, nlohmann::json> presets();

/// Load and parse a config file.  Throws std::runtime_error on I/O or
/// parse/validation failure.
RunConfig load_config_file(const std::string& path);

/// Execute the configured run, writing manifest.json, summary.json, and
/// CSVs under config.output_dir.  Returns a process exit status (0 on
/// success; per-grid-point failures are recorded in the summary without
/// aborting the sweep).
int run(const RunConfig& config);

/// FNV-1a 64-bit hash, hex-encoded; used as the config content hash.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace floq
