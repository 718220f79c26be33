// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace floq {

/**
 * Classical excitation walk behind the J = pi circuit: bonds are processed
 * cyclically in permutation order; a bond touching the excitation's site
 * carries it across (b -> b+1 counts +1, b+1 -> b counts -1).  The walk
 * ends at the first return to the start site after winding the ring once
 * (signed displacement +-N); the drift velocity is N divided by the elapsed
 * time g/N (g = gates processed up to and including the returning one):
 * drift = N^2 / g, in sites per Floquet period.
 */
struct WalkResult {
  double drift;
  std::int64_t gates;
};

WalkResult drift_of_permutation(int N, const std::vector<int>& perm);

/// Ascending bond order starting at bond N/2: carries the excitation all
/// the way around in one period (drift = N, the maximum).
std::vector<int> staircase_permutation(int N);

/// Ascending bond order starting at bond N/2 - 1: the slowest time-ordering
/// pattern, drift = N^2/(N^2 - 2N + 2).
std::vector<int> reversed_staircase_permutation(int N);

struct DriftEstimate {
  double mean;     ///< ensemble velocity N^2 / mean(gates), see typical_drift
  double stderr_;  ///< delta-method standard error; 0 when exact
  std::int64_t n;  ///< permutations enumerated or sampled
  bool exact;
};

/**
 * Typical drift over uniformly random permutations, as the ensemble-average
 * velocity: every walk covers the same distance (N sites), so the average
 * speed is total distance over total time, nu = N^2 / mean(gates).  This is
 * the ratio of means, not the mean of per-permutation ratios; the two agree
 * for any single permutation (so the staircase extremes are unchanged) but
 * differ over an ensemble.  Enumerates all N! permutations exactly when
 * N! <= 4e6 (N <= 10); otherwise Monte Carlo with n_samples draws seeded by
 * `seed`, with the standard error propagated through the reciprocal.
 */
DriftEstimate typical_drift(int N, std::int64_t n_samples, std::uint64_t seed);

}  // namespace floq
