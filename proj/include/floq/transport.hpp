// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "floq/circuit.hpp"
#include "floq/circular_stats.hpp"
#include "floq/rng.hpp"
#include "floq/sector_space.hpp"

namespace floq {

/// How to draw the pre-projection state in the sector.
enum class InitialStateKind {
  kGaussian,  ///< i.i.d. complex Gaussian amplitudes
  kPhase,     ///< equal moduli, i.i.d. uniform phases
};

/// Draw a random sector state and project site `site` up (renormalized), so
/// M_site(0) = 1/2 exactly.  Retries with fresh draws in the measure-zero
/// event of vanishing projection weight; throws if the sector has no
/// up-at-site states at all.
SectorState initial_state(std::shared_ptr<const SectorBasis> basis, int site,
                          InitialStateKind kind, Rng& rng);

/// Measurement grid: every integer in [1, min(100, t_max)], then
/// round(10^(k/25)) for increasing k (25 points per decade, deduplicated)
/// up to t_max; t_max always included.  Requires t_max >= 1.
std::vector<std::int64_t> stroboscopic_schedule(std::int64_t t_max);

/// Observables of one trajectory on the measurement grid.
struct TransportTrace {
  std::vector<std::int64_t> times;
  std::vector<double> sigma;  ///< circular spread of the quasiprobability
  std::vector<double> nu;     ///< drift speed; NaN off the dense grid
  std::vector<double> pmax;   ///< max quasiprobability weight
  std::vector<std::complex<double>> R;          ///< circular moment
  std::vector<std::vector<double>> profiles;    ///< quasiprobability p_n
};

/// Evolve a prepared initial state under one circuit, measuring on the
/// grid.  nu = (N / 2pi) |wrap(mu~(t) - mu~(t-1))| only where the previous
/// grid point is t - 1 and t <= 100; NaN elsewhere.
TransportTrace run_trajectory(const CircuitKernel& kernel,
                              const SectorState& psi0, std::int64_t t_max);

/// Self-contained variant: samples the circuit with derive_seed(seed, 1)
/// and the initial state with derive_seed(seed, 2).
TransportTrace run_trajectory(int N, int M, double J, double Jz,
                              std::uint64_t seed, std::int64_t t_max,
                              InitialStateKind kind = InitialStateKind::kGaussian);

/// Circular moment of a site-weight profile (weights p_n at the standard
/// site angles).  Used for the spread of the ensemble-averaged profile, as
/// opposed to the ensemble average of per-trajectory spreads.
CircularMoment profile_moment(const std::vector<double>& p);

/// Pointwise ensemble statistics.  Non-finite entries are excluded from
/// that time's mean; n_* counts contributors; stderr is the sample
/// standard error (0 when n <= 1).  <sigma> averages per-trajectory sigma
/// values; sigma_avg_profile is the spread of the averaged profile.
struct EnsembleTrace {
  std::vector<std::int64_t> times;
  std::vector<double> mean_sigma, se_sigma;
  std::vector<double> mean_nu, se_nu;
  std::vector<double> mean_pmax, se_pmax;
  std::vector<std::complex<double>> mean_R;
  std::vector<int> n_sigma, n_nu;
  std::vector<std::vector<double>> mean_profile;  ///< per time, size N
  std::vector<double> sigma_avg_profile;
  int n_traj = 0;
};

/// Throws on schedule mismatch between traces.
EnsembleTrace ensemble_average(const std::vector<TransportTrace>& traces);

/// Power-law fit y ~ t^alpha with resampling error bars.
///
/// Each of n_reps repetitions: multiply both window endpoints by
/// independent N(1, 0.2) factors, resample ceil(n_traj / 3) distinct
/// trajectories, average them pointwise, and least-squares fit
/// ln y = b ln t + c over grid times inside the perturbed window (only
/// finite, positive averages participate).  Repetitions with fewer than 4
/// usable points are skipped.  alpha = mean of the slopes, stderr = their
/// sample standard deviation.  Throws if every repetition was skipped.
struct FitResult {
  double alpha = 0.0;
  double stderr_ = 0.0;
  int n_reps_used = 0;
};

FitResult fit_exponent(const std::vector<std::int64_t>& times,
                       const std::vector<std::vector<double>>& series,
                       double window_lo, double window_hi, Rng& rng,
                       int n_reps = 25);

/// Time-averaged drift speed: (1/T) * integral_0^T <nu(t)> dt with
/// T = N / nu_typ, trapezoid rule on the dense grid, nu(0) := nu(1).
/// Throws if the dense data does not cover [0, T] or nu_typ <= 0.
double time_averaged_drift(const std::vector<std::int64_t>& times,
                           const std::vector<double>& mean_nu, int N,
                           double nu_typ);

/// First grid times where the ensemble spread/peak cross their thresholds:
/// t_sigma: <sigma> > N/30 + 1.25;  t_p: <p_max> < 2.6/N.
/// +infinity when never crossed.
struct PrethermalTimes {
  double t_sigma = 0.0;
  double t_p = 0.0;
};

PrethermalTimes prethermal_times(const std::vector<std::int64_t>& times,
                                 const std::vector<double>& mean_sigma,
                                 const std::vector<double>& mean_pmax, int N);

/// Explicit-threshold variant (the N overload fills in the defaults).
PrethermalTimes prethermal_times(const std::vector<std::int64_t>& times,
                                 const std::vector<double>& mean_sigma,
                                 const std::vector<double>& mean_pmax,
                                 double sigma_threshold, double pmax_threshold);

/// Connected sector correlation from a magnetization profile:
/// C_n = M_n - M * C(N, N/2 + M) / (2N).
std::vector<double> correlation_from_profile(const std::vector<double>& profile,
                                             int N, int M);

/// Distance between U(J = Jz = pi - J', zero fields) |psi> and the
/// normalized first-order expansion (1 - i J'/4) SWAP|psi> + i(J'/2)|psi>,
/// minimized over a global phase.  O(J'^2) for small J'.
double swap_point_expansion_check(double J_prime, const Eigen::Vector4cd& psi);

/// Ensemble driver: n_traj independent (circuit, initial state) pairs at
/// one parameter point, seeded per trajectory as
///   traj_seed = derive_seed(master_seed, grid_index, i)
/// then circuit <- derive_seed(traj_seed, 1), state <- derive_seed(traj_seed, 2),
/// so results are independent of thread count and scheduling.
struct EnsembleParams {
  int N = 0;
  int M = 0;  ///< sector magnetization (n_up = N/2 + M)
  double J = 0.0;
  double Jz = 0.0;
  int n_traj = 1;
  std::int64_t t_max = 100;
  std::uint64_t master_seed = 1;
  std::uint64_t grid_index = 0;
  int threads = 1;
  InitialStateKind kind = InitialStateKind::kGaussian;
  std::size_t table_budget_bytes = 256u << 20;
  bool keep_profiles = false;  ///< retain per-trajectory profiles in traces
};

struct EnsembleResult {
  std::vector<TransportTrace> traces;  ///< index = trajectory
  EnsembleTrace mean;
};

EnsembleResult run_transport_ensemble(const EnsembleParams& params);

}  // namespace floq
