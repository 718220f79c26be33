// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <thread>

#include "floq/drift_mc.hpp"
#include "floq/spectral.hpp"
#include "floq/transport.hpp"

namespace floq {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;
// Auxiliary seed lanes; trajectory/realization indices stay far below these.
constexpr std::uint64_t kFitLane = 1000000007ULL;
constexpr std::uint64_t kNuTypLane = 1000000009ULL;

std::string fmt_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

/// JSON has no infinities; crossings that never happen are encoded as -1.
double json_sentinel(double x) { return std::isfinite(x) ? x : -1.0; }

std::string trace_csv(const TransportTrace& tr) {
  std::string s = "t,sigma,nu,pmax,re_R,im_R\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    s += std::to_string(tr.times[k]);
    s += ',';
    s += fmt_double(tr.sigma[k]);
    s += ',';
    s += fmt_double(tr.nu[k]);
    s += ',';
    s += fmt_double(tr.pmax[k]);
    s += ',';
    s += fmt_double(tr.R[k].real());
    s += ',';
    s += fmt_double(tr.R[k].imag());
    s += '\n';
  }
  return s;
}

std::string mean_csv(const EnsembleTrace& m) {
  std::string s =
      "t,sigma,nu,pmax,re_R,im_R,se_sigma,se_nu,se_pmax,sigma_avg_profile\n";
  const bool have_avg = m.sigma_avg_profile.size() == m.times.size();
  for (std::size_t k = 0; k < m.times.size(); ++k) {
    s += std::to_string(m.times[k]);
    s += ',';
    s += fmt_double(m.mean_sigma[k]);
    s += ',';
    s += fmt_double(m.mean_nu[k]);
    s += ',';
    s += fmt_double(m.mean_pmax[k]);
    s += ',';
    s += fmt_double(m.mean_R[k].real());
    s += ',';
    s += fmt_double(m.mean_R[k].imag());
    s += ',';
    s += fmt_double(m.se_sigma[k]);
    s += ',';
    s += fmt_double(m.se_nu[k]);
    s += ',';
    s += fmt_double(m.se_pmax[k]);
    s += ',';
    s += fmt_double(have_avg ? m.sigma_avg_profile[k]
                             : std::numeric_limits<double>::quiet_NaN());
    s += '\n';
  }
  return s;
}

std::vector<double> parse_grid(const json& v, const std::string& key) {
  std::vector<double> grid;
  if (v.is_number()) {
    grid.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number())
        throw std::runtime_error("config field '" + key +
                                 "': expected numbers in the array");
      grid.push_back(x.get<double>());
    }
  } else {
    throw std::runtime_error("config field '" + key +
                             "': expected a number or an array of numbers");
  }
  if (grid.empty())
    throw std::runtime_error("config field '" + key + "': empty grid");
  return grid;
}

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinFit least_squares(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2 || n != ys.size())
    throw std::invalid_argument("least_squares: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate xs");
  LinFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

int resolve_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double resolve_nu_typ(const RunConfig& cfg) {
  if (cfg.nu_typ > 0.0) return cfg.nu_typ;
  if (cfg.nu_typ < 0.0 || cfg.nu_typ_samples <= 0) return 2.0;
  return typical_drift(cfg.N, cfg.nu_typ_samples,
                       derive_seed(cfg.master_seed, kNuTypLane))
      .mean;
}

/// Fits, drift average, and threshold crossings for one ensemble.
json analyze_point(const RunConfig& cfg, double J, double Jz,
                   std::uint64_t grid_index, const EnsembleResult& ens,
                   double nu_typ_value) {
  json s;
  s["J"] = J;
  s["Jz"] = Jz;
  s["n_trajectories"] = ens.mean.n_traj;

  std::vector<std::vector<double>> sigma_series, pmax_series;
  sigma_series.reserve(ens.traces.size());
  pmax_series.reserve(ens.traces.size());
  for (const auto& tr : ens.traces) {
    sigma_series.push_back(tr.sigma);
    pmax_series.push_back(tr.pmax);
  }
  Rng fit_rng(derive_seed(cfg.master_seed, grid_index, kFitLane));
  try {
    const FitResult f = fit_exponent(ens.mean.times, sigma_series,
                                     cfg.window_lo, cfg.window_hi, fit_rng);
    s["alpha_sigma"] = {{"value", f.alpha},
                        {"stderr", f.stderr_},
                        {"reps_used", f.n_reps_used}};
  } catch (const std::exception& e) {
    s["alpha_sigma"] = {{"error", e.what()}};
  }
  try {
    const FitResult f = fit_exponent(ens.mean.times, pmax_series,
                                     cfg.window_lo, cfg.window_hi, fit_rng);
    // p_max decays ~ t^-alpha_p; report the decay rate positively.
    s["alpha_p"] = {{"value", -f.alpha},
                    {"stderr", f.stderr_},
                    {"reps_used", f.n_reps_used}};
  } catch (const std::exception& e) {
    s["alpha_p"] = {{"error", e.what()}};
  }

  s["nu_typ"] = nu_typ_value;
  try {
    s["nu_bar"] =
        time_averaged_drift(ens.mean.times, ens.mean.mean_nu, cfg.N, nu_typ_value);
  } catch (const std::exception& e) {
    s["nu_bar"] = nullptr;
    s["nu_bar_error"] = e.what();
  }

  const double sig_thr = cfg.sigma_threshold > 0.0
                             ? cfg.sigma_threshold
                             : static_cast<double>(cfg.N) / 30.0 + 1.25;
  const double pmx_thr = cfg.pmax_threshold > 0.0
                             ? cfg.pmax_threshold
                             : 2.6 / static_cast<double>(cfg.N);
  const PrethermalTimes pt = prethermal_times(
      ens.mean.times, ens.mean.mean_sigma, ens.mean.mean_pmax, sig_thr, pmx_thr);
  s["t_sigma"] = json_sentinel(pt.t_sigma);
  s["t_p"] = json_sentinel(pt.t_p);
  return s;
}

json manifest_skeleton(const RunConfig& cfg) {
  json m;
  m["code_version"] = kCodeVersion;
  m["config"] = cfg.to_json();
  m["config_hash"] = fnv1a64_hex(m["config"].dump());
  m["seed_derivation"] =
      "trajectory_seed = derive_seed(master_seed, grid_index, index); "
      "circuit seed = derive_seed(trajectory_seed, 1); initial-state seed = "
      "derive_seed(trajectory_seed, 2); eigensolver start seed = "
      "derive_seed(trajectory_seed, 3)";
  return m;
}

json seed_table(std::uint64_t master, std::uint64_t grid_index, int count) {
  json arr = json::array();
  for (int i = 0; i < count; ++i)
    arr.push_back(derive_seed(master, grid_index, static_cast<std::uint64_t>(i)));
  return arr;
}

int run_transport_mode(const RunConfig& cfg) {
  const fs::path out(cfg.output_dir);
  const double J = cfg.j_values[0];
  const double Jz = cfg.jz_values[0];

  EnsembleParams p;
  p.N = cfg.N;
  p.M = cfg.M;
  p.J = J;
  p.Jz = Jz;
  p.n_traj = cfg.n_trajectories;
  p.t_max = cfg.t_max;
  p.master_seed = cfg.master_seed;
  p.grid_index = 0;
  p.threads = resolve_threads(cfg);
  p.kind = cfg.init_state == "phase" ? InitialStateKind::kPhase
                                     : InitialStateKind::kGaussian;
  const EnsembleResult ens = run_transport_ensemble(p);
  const double nu_typ_value = resolve_nu_typ(cfg);

  json manifest = manifest_skeleton(cfg);
  const json grid_entry = {{"index", 0}, {"J", J}, {"Jz", Jz}};
  manifest["grid"] = json::array({grid_entry});
  const json seed_entry = {
      {"grid_index", 0},
      {"trajectory_seeds", seed_table(cfg.master_seed, 0, cfg.n_trajectories)}};
  manifest["seeds"] = json::array({seed_entry});
  json outputs = json::array();

  if (cfg.trace_csv) {
    for (std::size_t i = 0; i < ens.traces.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "trace_%04zu.csv", i);
      write_file(out / name, trace_csv(ens.traces[i]));
      outputs.push_back(name);
    }
  }
  write_file(out / "trace_mean.csv", mean_csv(ens.mean));
  outputs.push_back("trace_mean.csv");

  json summary;
  summary["mode"] = "transport";
  summary["points"] =
      json::array({analyze_point(cfg, J, Jz, 0, ens, nu_typ_value)});
  write_file(out / "summary.json", summary.dump(1) + "\n");
  outputs.push_back("summary.json");

  manifest["outputs"] = outputs;
  write_file(out / "manifest.json", manifest.dump(1) + "\n");
  return 0;
}

int run_sweep_mode(const RunConfig& cfg) {
  const fs::path out(cfg.output_dir);
  const double nu_typ_value = resolve_nu_typ(cfg);

  json manifest = manifest_skeleton(cfg);
  json grid = json::array();
  json seeds = json::array();
  json outputs = json::array();
  json points = json::array();

  std::uint64_t gi = 0;
  for (const double Jz : cfg.jz_values) {
    for (const double J : cfg.j_values) {
      grid.push_back({{"index", gi}, {"J", J}, {"Jz", Jz}});
      seeds.push_back({{"grid_index", gi},
                       {"trajectory_seeds",
                        seed_table(cfg.master_seed, gi, cfg.n_trajectories)}});
      try {
        EnsembleParams p;
        p.N = cfg.N;
        p.M = cfg.M;
        p.J = J;
        p.Jz = Jz;
        p.n_traj = cfg.n_trajectories;
        p.t_max = cfg.t_max;
        p.master_seed = cfg.master_seed;
        p.grid_index = gi;
        p.threads = resolve_threads(cfg);
        p.kind = cfg.init_state == "phase" ? InitialStateKind::kPhase
                                           : InitialStateKind::kGaussian;
        const EnsembleResult ens = run_transport_ensemble(p);
        json s = analyze_point(cfg, J, Jz, gi, ens, nu_typ_value);
        s["grid_index"] = gi;
        points.push_back(std::move(s));
        char name[40];
        std::snprintf(name, sizeof(name), "point_%04llu_mean.csv",
                      static_cast<unsigned long long>(gi));
        write_file(out / name, mean_csv(ens.mean));
        outputs.push_back(name);
      } catch (const std::exception& e) {
        points.push_back(
            {{"grid_index", gi}, {"J", J}, {"Jz", Jz}, {"error", e.what()}});
      }
      ++gi;
    }
  }

  json summary;
  summary["mode"] = "sweep";
  summary["points"] = std::move(points);
  write_file(out / "summary.json", summary.dump(1) + "\n");
  outputs.push_back("summary.json");

  manifest["grid"] = std::move(grid);
  manifest["seeds"] = std::move(seeds);
  manifest["outputs"] = std::move(outputs);
  write_file(out / "manifest.json", manifest.dump(1) + "\n");
  return 0;
}

int run_prethermal_mode(const RunConfig& cfg) {
  const fs::path out(cfg.output_dir);

  json manifest = manifest_skeleton(cfg);
  json grid = json::array();
  json seeds = json::array();
  json outputs = json::array();
  json points = json::array();

  std::vector<double> ln_jp, ln_tp, ln_ts;
  for (std::size_t i = 0; i < cfg.jp_values.size(); ++i) {
    const double jp = cfg.jp_values[i];
    const double J = kPi - jp;
    const auto gi = static_cast<std::uint64_t>(i);
    const std::int64_t horizon = std::min<std::int64_t>(
        cfg.t_max,
        std::max<std::int64_t>(
            300, std::llround(cfg.prethermal_c *
                              std::pow(jp, -cfg.prethermal_exp))));
    grid.push_back(
        {{"index", gi}, {"J_prime", jp}, {"J", J}, {"Jz", J}, {"t_max", horizon}});
    seeds.push_back({{"grid_index", gi},
                     {"trajectory_seeds",
                      seed_table(cfg.master_seed, gi, cfg.n_trajectories)}});
    try {
      EnsembleParams p;
      p.N = cfg.N;
      p.M = cfg.M;
      p.J = J;
      p.Jz = J;
      p.n_traj = cfg.n_trajectories;
      p.t_max = horizon;
      p.master_seed = cfg.master_seed;
      p.grid_index = gi;
      p.threads = resolve_threads(cfg);
      p.kind = cfg.init_state == "phase" ? InitialStateKind::kPhase
                                         : InitialStateKind::kGaussian;
      const EnsembleResult ens = run_transport_ensemble(p);

      const double sig_thr = cfg.sigma_threshold > 0.0
                                 ? cfg.sigma_threshold
                                 : static_cast<double>(cfg.N) / 30.0 + 1.25;
      const double pmx_thr = cfg.pmax_threshold > 0.0
                                 ? cfg.pmax_threshold
                                 : 2.6 / static_cast<double>(cfg.N);
      const PrethermalTimes pt =
          prethermal_times(ens.mean.times, ens.mean.mean_sigma,
                           ens.mean.mean_pmax, sig_thr, pmx_thr);
      if (std::isfinite(pt.t_p)) {
        ln_jp.push_back(std::log(jp));
        ln_tp.push_back(std::log(pt.t_p));
      }
      if (std::isfinite(pt.t_sigma)) ln_ts.push_back(std::log(pt.t_sigma));

      points.push_back({{"grid_index", gi},
                        {"J_prime", jp},
                        {"J", J},
                        {"Jz", J},
                        {"t_max", horizon},
                        {"t_sigma", json_sentinel(pt.t_sigma)},
                        {"t_p", json_sentinel(pt.t_p)}});
      char name[40];
      std::snprintf(name, sizeof(name), "point_%04llu_mean.csv",
                    static_cast<unsigned long long>(gi));
      write_file(out / name, mean_csv(ens.mean));
      outputs.push_back(name);
    } catch (const std::exception& e) {
      points.push_back({{"grid_index", gi}, {"J_prime", jp}, {"error", e.what()}});
    }
  }

  json summary;
  summary["mode"] = "prethermal";
  summary["points"] = std::move(points);
  if (ln_tp.size() >= 2) {
    const LinFit f = least_squares(ln_jp, ln_tp);
    summary["slope_t_p"] = {{"value", f.slope},
                            {"n_points", ln_tp.size()}};
  } else {
    summary["slope_t_p"] = {{"error", "fewer than 2 finite t_p points"}};
  }
  write_file(out / "summary.json", summary.dump(1) + "\n");
  outputs.push_back("summary.json");

  manifest["grid"] = std::move(grid);
  manifest["seeds"] = std::move(seeds);
  manifest["outputs"] = std::move(outputs);
  write_file(out / "manifest.json", manifest.dump(1) + "\n");
  return 0;
}

int run_spectral_mode(const RunConfig& cfg) {
  const fs::path out(cfg.output_dir);
  const int cut = cfg.cut > 0 ? cfg.cut : cfg.N / 2;
  auto basis = std::make_shared<const SectorBasis>(cfg.N, cfg.M);
  auto tables = std::make_shared<const BondTables>(*basis);
  const double page = page_entropy(std::pow(2.0, cut), std::pow(2.0, cfg.N));

  json manifest = manifest_skeleton(cfg);
  json grid = json::array();
  json seeds = json::array();
  json outputs = json::array();
  json points = json::array();

  std::uint64_t gi = 0;
  for (const double Jz : cfg.jz_values) {
    for (const double J : cfg.j_values) {
      grid.push_back({{"index", gi}, {"J", J}, {"Jz", Jz}});
      seeds.push_back({{"grid_index", gi},
                       {"realization_seeds",
                        seed_table(cfg.master_seed, gi, cfg.n_realizations)}});
      try {
        std::vector<double> all_r, all_s;
        int n_converged = 0;
        std::int64_t matvecs = 0;
        for (int r = 0; r < cfg.n_realizations; ++r) {
          const std::uint64_t rs =
              derive_seed(cfg.master_seed, gi, static_cast<std::uint64_t>(r));
          const FloquetCircuit circuit =
              sample_circuit(cfg.N, J, Jz, derive_seed(rs, 1));
          CircuitKernel kernel(circuit, basis, tables);
          PolfedConfig pc;
          pc.n_eigs = cfg.n_eigs;
          pc.filter_order = cfg.filter_order;
          pc.filter_power = cfg.filter_power;
          pc.keep_vectors = false;
          Rng arng(derive_seed(rs, 3));
          const SpectralResult res = spectral_diagnostics(kernel, pc, arng, cut);
          all_r.insert(all_r.end(), res.gap_ratios.begin(), res.gap_ratios.end());
          all_s.insert(all_s.end(), res.entropies.begin(), res.entropies.end());
          n_converged += res.converged ? 1 : 0;
          matvecs += res.matvecs;

          json rj;
          rj["grid_index"] = gi;
          rj["realization"] = r;
          rj["J"] = J;
          rj["Jz"] = Jz;
          rj["eigenphases"] = res.eigenphases;
          rj["residuals"] = res.residuals;
          rj["converged"] = res.converged;
          rj["matvecs"] = res.matvecs;
          double mr = 0.0, ms = 0.0;
          for (const double x : res.gap_ratios) mr += x;
          for (const double x : res.entropies) ms += x;
          rj["mean_r"] =
              res.gap_ratios.empty() ? 0.0 : mr / res.gap_ratios.size();
          rj["mean_entropy"] =
              res.entropies.empty() ? 0.0 : ms / res.entropies.size();
          char name[48];
          std::snprintf(name, sizeof(name), "spectral_p%04llu_r%03d.json",
                        static_cast<unsigned long long>(gi), r);
          write_file(out / name, rj.dump(1) + "\n");
          outputs.push_back(name);
        }
        double mean_r = 0.0, mean_s = 0.0;
        for (const double x : all_r) mean_r += x;
        for (const double x : all_s) mean_s += x;
        mean_r = all_r.empty() ? 0.0 : mean_r / all_r.size();
        mean_s = all_s.empty() ? 0.0 : mean_s / all_s.size();
        points.push_back({{"grid_index", gi},
                          {"J", J},
                          {"Jz", Jz},
                          {"cut", cut},
                          {"mean_r", mean_r},
                          {"mean_entropy", mean_s},
                          {"page_entropy", page},
                          {"entropy_ratio", page > 0.0 ? mean_s / page : 0.0},
                          {"n_realizations", cfg.n_realizations},
                          {"n_converged", n_converged},
                          {"matvecs", matvecs}});
      } catch (const std::exception& e) {
        points.push_back(
            {{"grid_index", gi}, {"J", J}, {"Jz", Jz}, {"error", e.what()}});
      }
      ++gi;
    }
  }

  json summary;
  summary["mode"] = "spectral";
  summary["points"] = std::move(points);
  write_file(out / "summary.json", summary.dump(1) + "\n");
  outputs.push_back("summary.json");

  manifest["grid"] = std::move(grid);
  manifest["seeds"] = std::move(seeds);
  manifest["outputs"] = std::move(outputs);
  write_file(out / "manifest.json", manifest.dump(1) + "\n");
  return 0;
}

int run_drift_mode(const RunConfig& cfg) {
  const fs::path out(cfg.output_dir);

  json manifest = manifest_skeleton(cfg);
  json grid = json::array();
  json seeds = json::array();
  json points = json::array();
  std::string csv = "N,mean_drift,stderr,samples,exact\n";

  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    const int n = cfg.n_values[i];
    const auto gi = static_cast<std::uint64_t>(i);
    const std::int64_t samples = n <= 20 ? cfg.samples : cfg.samples_large;
    const std::uint64_t seed = derive_seed(cfg.master_seed, gi);
    grid.push_back({{"index", gi}, {"N", n}, {"samples", samples}});
    seeds.push_back({{"grid_index", gi}, {"seed", seed}});
    try {
      const DriftEstimate est = typical_drift(n, samples, seed);
      points.push_back({{"grid_index", gi},
                        {"N", n},
                        {"mean_drift", est.mean},
                        {"stderr", est.stderr_},
                        {"samples", est.n},
                        {"exact", est.exact}});
      csv += std::to_string(n) + ',' + fmt_double(est.mean) + ',' +
             fmt_double(est.stderr_) + ',' + std::to_string(est.n) + ',' +
             (est.exact ? "1" : "0") + '\n';
    } catch (const std::exception& e) {
      points.push_back({{"grid_index", gi}, {"N", n}, {"error", e.what()}});
    }
  }

  write_file(out / "drift.csv", csv);
  json summary;
  summary["mode"] = "drift";
  summary["points"] = std::move(points);
  write_file(out / "summary.json", summary.dump(1) + "\n");

  manifest["grid"] = std::move(grid);
  manifest["seeds"] = std::move(seeds);
  manifest["outputs"] = json::array({"drift.csv", "summary.json"});
  write_file(out / "manifest.json", manifest.dump(1) + "\n");
  return 0;
}

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object())
    throw std::runtime_error("config: top level must be a JSON object");
  RunConfig c;
  bool jz_set = false;

  auto expect = [](bool ok, const std::string& key, const char* what) {
    if (!ok)
      throw std::runtime_error("config field '" + key + "': expected " + what);
  };

  for (const auto& [key, v] : j.items()) {
    if (key == "mode") {
      expect(v.is_string(), key, "a string");
      c.mode = v.get<std::string>();
    } else if (key == "N") {
      expect(v.is_number_integer(), key, "an integer");
      c.N = v.get<int>();
    } else if (key == "M") {
      expect(v.is_number_integer(), key, "an integer");
      c.M = v.get<int>();
    } else if (key == "J") {
      c.j_values = parse_grid(v, key);
    } else if (key == "Jz") {
      c.jz_values = parse_grid(v, key);
      jz_set = true;
    } else if (key == "J_prime") {
      c.jp_values = parse_grid(v, key);
    } else if (key == "n_values") {
      expect(v.is_array() && !v.empty(), key, "a non-empty array of integers");
      c.n_values.clear();
      for (const auto& x : v) {
        expect(x.is_number_integer(), key, "integers in the array");
        c.n_values.push_back(x.get<int>());
      }
    } else if (key == "n_trajectories") {
      expect(v.is_number_integer(), key, "an integer");
      c.n_trajectories = v.get<int>();
    } else if (key == "t_max") {
      expect(v.is_number_integer(), key, "an integer");
      c.t_max = v.get<std::int64_t>();
    } else if (key == "master_seed") {
      expect(v.is_number_unsigned() || v.is_number_integer(), key,
             "an integer");
      c.master_seed = v.get<std::uint64_t>();
    } else if (key == "output_dir") {
      expect(v.is_string(), key, "a string");
      c.output_dir = v.get<std::string>();
    } else if (key == "window") {
      expect(v.is_array() && v.size() == 2 && v[0].is_number() &&
                 v[1].is_number(),
             key, "[lo, hi]");
      c.window_lo = v[0].get<double>();
      c.window_hi = v[1].get<double>();
    } else if (key == "init_state") {
      expect(v.is_string(), key, "\"gaussian\" or \"phase\"");
      c.init_state = v.get<std::string>();
    } else if (key == "threads") {
      expect(v.is_number_integer(), key, "an integer");
      c.threads = v.get<int>();
    } else if (key == "trace_csv") {
      expect(v.is_boolean(), key, "a boolean");
      c.trace_csv = v.get<bool>();
    } else if (key == "sigma_threshold") {
      expect(v.is_number(), key, "a number");
      c.sigma_threshold = v.get<double>();
    } else if (key == "pmax_threshold") {
      expect(v.is_number(), key, "a number");
      c.pmax_threshold = v.get<double>();
    } else if (key == "nu_typ") {
      expect(v.is_number(), key, "a number");
      c.nu_typ = v.get<double>();
    } else if (key == "nu_typ_samples") {
      expect(v.is_number_integer(), key, "an integer");
      c.nu_typ_samples = v.get<std::int64_t>();
    } else if (key == "prethermal_c") {
      expect(v.is_number(), key, "a number");
      c.prethermal_c = v.get<double>();
    } else if (key == "prethermal_exp") {
      expect(v.is_number(), key, "a number");
      c.prethermal_exp = v.get<double>();
    } else if (key == "n_realizations") {
      expect(v.is_number_integer(), key, "an integer");
      c.n_realizations = v.get<int>();
    } else if (key == "n_eigs") {
      expect(v.is_number_integer(), key, "an integer");
      c.n_eigs = v.get<int>();
    } else if (key == "filter_order") {
      expect(v.is_number_integer(), key, "an integer");
      c.filter_order = v.get<int>();
    } else if (key == "filter_power") {
      expect(v.is_number_integer(), key, "an integer");
      c.filter_power = v.get<int>();
    } else if (key == "cut") {
      expect(v.is_number_integer(), key, "an integer");
      c.cut = v.get<int>();
    } else if (key == "samples") {
      expect(v.is_number_integer(), key, "an integer");
      c.samples = v.get<std::int64_t>();
    } else if (key == "samples_large") {
      expect(v.is_number_integer(), key, "an integer");
      c.samples_large = v.get<std::int64_t>();
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }
  if (!jz_set) c.jz_values = {kPi};

  // Cross-field validation.
  static const std::set<std::string> kModes = {"transport", "spectral", "drift",
                                               "prethermal", "sweep"};
  if (c.mode.empty())
    throw std::runtime_error("config: missing required key 'mode'");
  if (kModes.find(c.mode) == kModes.end())
    throw std::runtime_error(
        "config field 'mode': must be one of transport|spectral|drift|"
        "prethermal|sweep");
  if (c.mode == "drift") {
    if (c.n_values.empty())
      throw std::runtime_error(
          "config field 'n_values': required (non-empty) in drift mode");
    for (const int n : c.n_values)
      if (n < 2 || n % 2 != 0)
        throw std::runtime_error(
            "config field 'n_values': entries must be even and >= 2");
    if (c.samples < 1 || c.samples_large < 1)
      throw std::runtime_error(
          "config field 'samples'/'samples_large': must be >= 1");
  } else {
    if (c.N < 2 || c.N % 2 != 0 || c.N > 28)
      throw std::runtime_error(
          "config field 'N': must be even and within [2, 28]");
    const int n_up = c.N / 2 + c.M;
    if (n_up < 0 || n_up > c.N)
      throw std::runtime_error("config field 'M': sector is empty (|M| > N/2)");
  }
  if (c.mode == "transport" &&
      (c.j_values.size() != 1 || c.jz_values.size() != 1))
    throw std::runtime_error(
        "config: transport mode expects scalar 'J' and 'Jz' (use sweep for "
        "grids)");
  if (c.mode == "prethermal") {
    if (c.jp_values.empty())
      throw std::runtime_error(
          "config field 'J_prime': required (non-empty) in prethermal mode");
    for (const double jp : c.jp_values)
      if (!(jp > 0.0) || !(jp < kPi))
        throw std::runtime_error(
            "config field 'J_prime': entries must lie in (0, pi)");
    if (!(c.prethermal_c > 0.0) || !(c.prethermal_exp > 0.0))
      throw std::runtime_error(
          "config field 'prethermal_c'/'prethermal_exp': must be > 0");
  }
  if (c.n_trajectories < 1)
    throw std::runtime_error("config field 'n_trajectories': must be >= 1");
  if (c.t_max < 1)
    throw std::runtime_error("config field 't_max': must be >= 1");
  if (!(c.window_lo > 0.0) || !(c.window_hi > c.window_lo))
    throw std::runtime_error(
        "config field 'window': need 0 < lo < hi");
  if (c.init_state != "gaussian" && c.init_state != "phase")
    throw std::runtime_error(
        "config field 'init_state': must be \"gaussian\" or \"phase\"");
  if (c.threads < 0)
    throw std::runtime_error("config field 'threads': must be >= 0");
  if (c.n_realizations < 1)
    throw std::runtime_error("config field 'n_realizations': must be >= 1");
  if (c.filter_power < 1)
    throw std::runtime_error("config field 'filter_power': must be >= 1");
  if (c.mode == "spectral" && (c.cut < 0 || c.cut >= c.N))
    throw std::runtime_error("config field 'cut': must lie in [0, N)");
  if (c.sigma_threshold < 0.0 || c.pmax_threshold < 0.0)
    throw std::runtime_error(
        "config field 'sigma_threshold'/'pmax_threshold': must be >= 0");
  return c;
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["mode"] = mode;
  j["N"] = N;
  j["M"] = M;
  j["J"] = j_values;
  j["Jz"] = jz_values;
  if (!jp_values.empty()) j["J_prime"] = jp_values;
  if (!n_values.empty()) j["n_values"] = n_values;
  j["n_trajectories"] = n_trajectories;
  j["t_max"] = t_max;
  j["master_seed"] = master_seed;
  j["output_dir"] = output_dir;
  j["window"] = {window_lo, window_hi};
  j["init_state"] = init_state;
  j["threads"] = threads;
  j["trace_csv"] = trace_csv;
  j["sigma_threshold"] = sigma_threshold;
  j["pmax_threshold"] = pmax_threshold;
  j["nu_typ"] = nu_typ;
  j["nu_typ_samples"] = nu_typ_samples;
  j["prethermal_c"] = prethermal_c;
  j["prethermal_exp"] = prethermal_exp;
  j["n_realizations"] = n_realizations;
  j["n_eigs"] = n_eigs;
  j["filter_order"] = filter_order;
  j["filter_power"] = filter_power;
  j["cut"] = cut;
  j["samples"] = samples;
  j["samples_large"] = samples_large;
  return j;
}

std::map<std::string, nlohmann::json> presets() {
  std::map<std::string, json> p;

  {
    json j;
    j["mode"] = "sweep";
    j["N"] = 16;
    j["M"] = 0;
    j["J"] = {0.395, 1.374, 2.551, 3.138};
    j["Jz"] = kPi;
    j["n_trajectories"] = 100;
    j["t_max"] = 100;
    j["window"] = {4.0, 40.0};
    j["master_seed"] = 20260819;
    j["output_dir"] = "runs/regime-points";
    p["regime-points"] = std::move(j);
  }
  {
    json j;
    j["mode"] = "sweep";
    j["N"] = 16;
    j["M"] = 0;
    std::vector<double> grid;
    for (int i = 0; i < 32; ++i)
      grid.push_back(0.05 + (3.10 - 0.05) * i / 31.0);
    j["J"] = grid;
    j["Jz"] = kPi;
    j["n_trajectories"] = 50;
    j["t_max"] = 100;
    j["window"] = {4.0, 40.0};
    j["master_seed"] = 20260819;
    j["output_dir"] = "runs/j-line-scan";
    p["j-line-scan"] = std::move(j);
  }
  {
    json j;
    j["mode"] = "sweep";
    j["N"] = 14;
    j["M"] = 0;
    std::vector<double> jg, jzg;
    for (int i = 0; i < 16; ++i) jg.push_back(0.1 + (3.1 - 0.1) * i / 15.0);
    for (int i = 0; i < 8; ++i) jzg.push_back(kPi * i / 7.0);
    j["J"] = jg;
    j["Jz"] = jzg;
    j["n_trajectories"] = 20;
    j["t_max"] = 100;
    j["window"] = {4.0, 40.0};
    j["master_seed"] = 20260819;
    j["output_dir"] = "runs/phase-diagram";
    p["phase-diagram"] = std::move(j);
  }
  {
    json j;
    j["mode"] = "prethermal";
    j["N"] = 16;
    j["M"] = 0;
    std::vector<double> jp;
    const double lo = std::log(0.05), hi = std::log(0.6);
    for (int i = 0; i < 8; ++i) jp.push_back(std::exp(lo + (hi - lo) * i / 7.0));
    j["J_prime"] = jp;
    j["n_trajectories"] = 50;
    j["t_max"] = 20000;
    j["master_seed"] = 20260819;
    j["output_dir"] = "runs/prethermal-sweep";
    p["prethermal-sweep"] = std::move(j);
  }
  {
    json j;
    j["mode"] = "drift";
    j["n_values"] = {8, 10, 12, 14, 16, 20, 24, 28};
    j["samples"] = 1000000;
    j["samples_large"] = 200000;
    j["master_seed"] = 20260819;
    j["output_dir"] = "runs/drift-curve";
    p["drift-curve"] = std::move(j);
  }
  return p;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

int run(const RunConfig& config) {
  fs::create_directories(config.output_dir);
  if (config.mode == "transport") return run_transport_mode(config);
  if (config.mode == "sweep") return run_sweep_mode(config);
  if (config.mode == "prethermal") return run_prethermal_mode(config);
  if (config.mode == "spectral") return run_spectral_mode(config);
  if (config.mode == "drift") return run_drift_mode(config);
  throw std::runtime_error("run: unknown mode '" + config.mode + "'");
}

}  // namespace floq
