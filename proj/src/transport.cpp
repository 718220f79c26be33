// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace floq {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}
}  // namespace

SectorState initial_state(std::shared_ptr<const SectorBasis> basis, int site,
                          InitialStateKind kind, Rng& rng) {
  if (!basis) throw std::invalid_argument("initial_state: null basis");
  for (int attempt = 0; attempt < 64; ++attempt) {
    SectorState psi = (kind == InitialStateKind::kGaussian)
                          ? random_sector_state(basis, rng)
                          : random_phase_state(basis, rng);
    auto proj = project_up(psi, site);
    if (proj) return std::move(proj->state);
  }
  throw std::runtime_error(
      "initial_state: projection weight vanished repeatedly (sector has no "
      "up-at-site states?)");
}

std::vector<std::int64_t> stroboscopic_schedule(std::int64_t t_max) {
  if (t_max < 1) throw std::invalid_argument("stroboscopic_schedule: t_max < 1");
  std::vector<std::int64_t> grid;
  const std::int64_t dense_end = std::min<std::int64_t>(100, t_max);
  for (std::int64_t t = 1; t <= dense_end; ++t) grid.push_back(t);
  for (int k = 1;; ++k) {
    const double v = std::pow(10.0, static_cast<double>(k) / 25.0);
    if (v > static_cast<double>(t_max) + 0.5) break;
    const auto t = static_cast<std::int64_t>(std::llround(v));
    if (t > 100 && t <= t_max && t > grid.back()) grid.push_back(t);
  }
  if (grid.back() != t_max) grid.push_back(t_max);
  return grid;
}

TransportTrace run_trajectory(const CircuitKernel& kernel,
                              const SectorState& psi0, std::int64_t t_max) {
  const SectorBasis& basis = *kernel.basis();
  const int N = basis.N();
  const int M = basis.n_up() - N / 2;
  const double mB = background_magnetization(N, M);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  TransportTrace trace;
  trace.times = stroboscopic_schedule(t_max);
  const std::size_t nt = trace.times.size();
  trace.sigma.reserve(nt);
  trace.nu.reserve(nt);
  trace.pmax.reserve(nt);
  trace.R.reserve(nt);
  trace.profiles.reserve(nt);

  SectorState psi = psi0;
  double mu_prev = drift_mu_tilde(quasiprob(measure_profile(psi), mB));
  std::int64_t t_prev = 0;
  for (const std::int64_t t : trace.times) {
    kernel.apply_power(psi, t - t_prev);
    const QuasiProb q = quasiprob(measure_profile(psi), mB);
    const CircularMoment cm = circular_mean(q);
    trace.sigma.push_back(cm.sigma);
    trace.R.push_back(cm.R);
    trace.pmax.push_back(*std::max_element(q.p.begin(), q.p.end()));
    double nu = kNaN;
    if (t <= 100 && t - t_prev == 1) {
      const double mu = drift_mu_tilde(q);
      nu = static_cast<double>(N) / two_pi *
           std::abs(std::remainder(mu - mu_prev, two_pi));
      mu_prev = mu;
    }
    trace.nu.push_back(nu);
    trace.profiles.push_back(q.p);
    t_prev = t;
  }
  return trace;
}

TransportTrace run_trajectory(int N, int M, double J, double Jz,
                              std::uint64_t seed, std::int64_t t_max,
                              InitialStateKind kind) {
  auto basis = std::make_shared<const SectorBasis>(N, M);
  const FloquetCircuit circuit = sample_circuit(N, J, Jz, derive_seed(seed, 1));
  CircuitKernel kernel(circuit, basis);
  Rng rng(derive_seed(seed, 2));
  const SectorState psi0 = initial_state(basis, N / 2, kind, rng);
  return run_trajectory(kernel, psi0, t_max);
}

CircularMoment profile_moment(const std::vector<double>& p) {
  QuasiProb q;
  q.p = p;
  q.theta = site_angles(static_cast<int>(p.size()));
  return circular_mean(q);
}

EnsembleTrace ensemble_average(const std::vector<TransportTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("ensemble_average: no traces");
  const std::size_t nt = traces[0].times.size();
  for (const auto& tr : traces)
    if (tr.times != traces[0].times)
      throw std::invalid_argument("ensemble_average: schedule mismatch");

  EnsembleTrace out;
  out.times = traces[0].times;
  out.n_traj = static_cast<int>(traces.size());
  const bool have_profiles =
      std::all_of(traces.begin(), traces.end(),
                  [&](const TransportTrace& tr) { return tr.profiles.size() == nt; });

  auto reduce = [&](auto getter, std::vector<double>& mean,
                    std::vector<double>& se, std::vector<int>* count) {
    mean.resize(nt);
    se.resize(nt);
    if (count) count->resize(nt);
    std::vector<double> vals;
    for (std::size_t k = 0; k < nt; ++k) {
      vals.clear();
      for (const auto& tr : traces) {
        const double x = getter(tr, k);
        if (std::isfinite(x)) vals.push_back(x);
      }
      if (count) (*count)[k] = static_cast<int>(vals.size());
      if (vals.empty()) {
        mean[k] = kNaN;
        se[k] = kNaN;
        continue;
      }
      const double m = sample_mean(vals);
      mean[k] = m;
      se[k] = sample_sd(vals, m) / std::sqrt(static_cast<double>(vals.size()));
    }
  };

  reduce([](const TransportTrace& tr, std::size_t k) { return tr.sigma[k]; },
         out.mean_sigma, out.se_sigma, &out.n_sigma);
  reduce([](const TransportTrace& tr, std::size_t k) { return tr.nu[k]; },
         out.mean_nu, out.se_nu, &out.n_nu);
  reduce([](const TransportTrace& tr, std::size_t k) { return tr.pmax[k]; },
         out.mean_pmax, out.se_pmax, nullptr);

  out.mean_R.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    std::complex<double> s = 0.0;
    for (const auto& tr : traces) s += tr.R[k];
    out.mean_R[k] = s / static_cast<double>(traces.size());
  }

  if (have_profiles) {
    const std::size_t N = traces[0].profiles[0].size();
    out.mean_profile.assign(nt, std::vector<double>(N, 0.0));
    out.sigma_avg_profile.resize(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      auto& row = out.mean_profile[k];
      for (const auto& tr : traces)
        for (std::size_t n = 0; n < N; ++n) row[n] += tr.profiles[k][n];
      for (double& x : row) x /= static_cast<double>(traces.size());
      out.sigma_avg_profile[k] = profile_moment(row).sigma;
    }
  }
  return out;
}

FitResult fit_exponent(const std::vector<std::int64_t>& times,
                       const std::vector<std::vector<double>>& series,
                       double window_lo, double window_hi, Rng& rng,
                       int n_reps) {
  const std::size_t n_traj = series.size();
  const std::size_t nt = times.size();
  if (n_traj == 0) throw std::invalid_argument("fit_exponent: no trajectories");
  for (const auto& row : series)
    if (row.size() != nt)
      throw std::invalid_argument("fit_exponent: series/grid size mismatch");
  if (n_reps < 1) throw std::invalid_argument("fit_exponent: n_reps < 1");

  const std::size_t n_sub = (n_traj + 2) / 3;  // ceil(n_traj / 3)
  std::vector<double> slopes;
  std::vector<double> xs, ys;
  for (int rep = 0; rep < n_reps; ++rep) {
    // Draw order (endpoint factors, then the resampling permutation) is
    // part of the reproducibility contract.
    const double lo = window_lo * (1.0 + 0.2 * rng.normal());
    const double hi = window_hi * (1.0 + 0.2 * rng.normal());
    const std::vector<int> perm = rng.permutation(static_cast<int>(n_traj));
    xs.clear();
    ys.clear();
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = static_cast<double>(times[k]);
      if (t <= 0.0 || t < lo || t > hi) continue;
      double sum = 0.0;
      int cnt = 0;
      for (std::size_t j = 0; j < n_sub; ++j) {
        const double y = series[static_cast<std::size_t>(perm[j])][k];
        if (std::isfinite(y)) {
          sum += y;
          ++cnt;
        }
      }
      if (cnt == 0) continue;
      const double m = sum / cnt;
      if (!(m > 0.0) || !std::isfinite(m)) continue;
      xs.push_back(std::log(t));
      ys.push_back(std::log(m));
    }
    if (xs.size() < 4) continue;
    const double mx = sample_mean(xs);
    const double my = sample_mean(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) continue;
    slopes.push_back(sxy / sxx);
  }
  if (slopes.empty())
    throw std::runtime_error("fit_exponent: all repetitions were skipped");
  FitResult fit;
  fit.alpha = sample_mean(slopes);
  fit.stderr_ = sample_sd(slopes, fit.alpha);
  fit.n_reps_used = static_cast<int>(slopes.size());
  return fit;
}

double time_averaged_drift(const std::vector<std::int64_t>& times,
                           const std::vector<double>& mean_nu, int N,
                           double nu_typ) {
  if (times.size() != mean_nu.size())
    throw std::invalid_argument("time_averaged_drift: size mismatch");
  if (!(nu_typ > 0.0))
    throw std::invalid_argument("time_averaged_drift: nu_typ must be > 0");
  const double T = static_cast<double>(N) / nu_typ;

  // Contiguous dense run of finite <nu> starting at t = 1; nu(0) := nu(1).
  std::vector<double> v;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] != static_cast<std::int64_t>(v.empty() ? 1 : v.size())) break;
    if (!std::isfinite(mean_nu[k])) break;
    if (v.empty()) v.push_back(mean_nu[k]);  // the t = 0 stand-in
    v.push_back(mean_nu[k]);
  }
  if (v.size() < 2)
    throw std::runtime_error("time_averaged_drift: no dense drift data");
  const double t_end = static_cast<double>(v.size() - 1);
  if (T > t_end + 1e-9)
    throw std::invalid_argument(
        "time_averaged_drift: dense schedule does not cover [0, T]");

  const auto whole = static_cast<std::size_t>(std::min(std::floor(T), t_end));
  double integral = 0.0;
  for (std::size_t t = 0; t + 1 <= whole; ++t)
    integral += 0.5 * (v[t] + v[t + 1]);
  const double frac = T - static_cast<double>(whole);
  if (frac > 0.0 && whole + 1 < v.size()) {
    const double v_T = v[whole] + frac * (v[whole + 1] - v[whole]);
    integral += 0.5 * (v[whole] + v_T) * frac;
  }
  return integral / T;
}

PrethermalTimes prethermal_times(const std::vector<std::int64_t>& times,
                                 const std::vector<double>& mean_sigma,
                                 const std::vector<double>& mean_pmax, int N) {
  return prethermal_times(times, mean_sigma, mean_pmax,
                          static_cast<double>(N) / 30.0 + 1.25,
                          2.6 / static_cast<double>(N));
}

PrethermalTimes prethermal_times(const std::vector<std::int64_t>& times,
                                 const std::vector<double>& mean_sigma,
                                 const std::vector<double>& mean_pmax,
                                 double sigma_thresh, double pmax_thresh) {
  if (times.size() != mean_sigma.size() || times.size() != mean_pmax.size())
    throw std::invalid_argument("prethermal_times: size mismatch");
  PrethermalTimes out{kInf, kInf};
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (out.t_sigma == kInf && std::isfinite(mean_sigma[k]) &&
        mean_sigma[k] > sigma_thresh)
      out.t_sigma = static_cast<double>(times[k]);
    if (out.t_p == kInf && std::isfinite(mean_pmax[k]) &&
        mean_pmax[k] < pmax_thresh)
      out.t_p = static_cast<double>(times[k]);
    if (out.t_sigma != kInf && out.t_p != kInf) break;
  }
  return out;
}

std::vector<double> correlation_from_profile(const std::vector<double>& profile,
                                             int N, int M) {
  if (static_cast<int>(profile.size()) != N)
    throw std::invalid_argument("correlation_from_profile: profile size != N");
  const int n_up = N / 2 + M;
  if (n_up < 0 || n_up > N)
    throw std::invalid_argument("correlation_from_profile: invalid sector");
  const double background = static_cast<double>(M) *
                            static_cast<double>(binomial(N, n_up)) /
                            (2.0 * static_cast<double>(N));
  std::vector<double> c(profile);
  for (double& x : c) x -= background;
  return c;
}

double swap_point_expansion_check(double J_prime, const Eigen::Vector4cd& psi) {
  const double nrm = psi.norm();
  if (!(nrm > 0.0))
    throw std::invalid_argument("swap_point_expansion_check: zero state");
  const Eigen::Vector4cd psi_n = psi / nrm;

  GateParams g;
  g.J = std::numbers::pi - J_prime;
  g.Jz = std::numbers::pi - J_prime;
  const Eigen::Vector4cd out = build_gate(g) * psi_n;

  Eigen::Vector4cd swapped;  // exchange the ud and du components
  swapped << psi_n(0), psi_n(2), psi_n(1), psi_n(3);
  const std::complex<double> i_unit(0.0, 1.0);
  Eigen::Vector4cd cand =
      (1.0 - i_unit * J_prime / 4.0) * swapped + i_unit * (J_prime / 2.0) * psi_n;
  cand /= cand.norm();

  // min over phi of ||out - e^{i phi} cand|| is attained at
  // phi = arg<cand|out>; forming the difference vector directly keeps full
  // precision near zero (sqrt(2 - 2|overlap|) floors out around 1e-8).
  const std::complex<double> z = cand.dot(out);
  const std::complex<double> phase =
      (std::abs(z) > 0.0) ? z / std::abs(z) : std::complex<double>(1.0, 0.0);
  return (out - phase * cand).norm();
}

EnsembleResult run_transport_ensemble(const EnsembleParams& params) {
  if (params.N < 2 || params.N % 2 != 0)
    throw std::invalid_argument("run_transport_ensemble: N must be even, >= 2");
  if (params.n_traj < 1)
    throw std::invalid_argument("run_transport_ensemble: n_traj < 1");
  auto basis = std::make_shared<const SectorBasis>(params.N, params.M);

  std::shared_ptr<const BondTables> tables;
  const double table_bytes = 4.0 * static_cast<double>(params.N) *
                             static_cast<double>(basis->dim());
  if (table_bytes <= static_cast<double>(params.table_budget_bytes))
    tables = std::make_shared<const BondTables>(*basis);

  std::vector<TransportTrace> traces(static_cast<std::size_t>(params.n_traj));
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= params.n_traj) return;
      try {
        const std::uint64_t traj_seed = derive_seed(
            params.master_seed, params.grid_index, static_cast<std::uint64_t>(i));
        const FloquetCircuit circuit = sample_circuit(
            params.N, params.J, params.Jz, derive_seed(traj_seed, 1));
        // Budget 0: tables were already rejected above; do not rebuild.
        CircuitKernel kernel(circuit, basis, tables, 0);
        Rng rng(derive_seed(traj_seed, 2));
        const SectorState psi0 =
            initial_state(basis, params.N / 2, params.kind, rng);
        traces[static_cast<std::size_t>(i)] =
            run_trajectory(kernel, psi0, params.t_max);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(
      1, std::min(params.threads, params.n_traj));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  EnsembleResult result;
  result.mean = ensemble_average(traces);
  if (!params.keep_profiles)
    for (auto& tr : traces) {
      tr.profiles.clear();
      tr.profiles.shrink_to_fit();
    }
  result.traces = std::move(traces);
  return result;
}

}  // namespace floq
