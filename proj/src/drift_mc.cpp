// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/drift_mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "floq/rng.hpp"

namespace floq {

WalkResult drift_of_permutation(int N, const std::vector<int>& perm) {
  if (N < 2) throw std::invalid_argument("drift_of_permutation: N < 2");
  if (static_cast<int>(perm.size()) != N)
    throw std::invalid_argument("drift_of_permutation: perm size != N");
  {
    std::vector<char> seen(N, 0);
    for (const int b : perm) {
      if (b < 0 || b >= N || seen[b])
        throw std::invalid_argument("drift_of_permutation: not a permutation");
      seen[b] = 1;
    }
  }
  int pos = N / 2;
  int cum = 0;
  std::int64_t g = 0;
  // Any permutation moves the excitation at least once per period and the
  // orientation-signed winding is monotone enough that |cum| = N is always
  // reached; the cap only guards against a logic regression.
  const std::int64_t cap = static_cast<std::int64_t>(N) * N * N * 16 + 1024;
  while (g < cap) {
    for (const int b : perm) {
      ++g;
      const int b1 = (b + 1) % N;
      if (pos == b) {
        pos = b1;
        ++cum;
      } else if (pos == b1) {
        pos = b;
        --cum;
      }
      if (cum == N || cum == -N)
        return {static_cast<double>(N) * N / static_cast<double>(g), g};
    }
  }
  throw std::runtime_error("drift_of_permutation: walk failed to wind");
}

std::vector<int> staircase_permutation(int N) {
  std::vector<int> p(N);
  for (int i = 0; i < N; ++i) p[i] = (N / 2 + i) % N;
  return p;
}

std::vector<int> reversed_staircase_permutation(int N) {
  std::vector<int> p(N);
  for (int i = 0; i < N; ++i) p[i] = (N / 2 - 1 + i + N) % N;
  return p;
}

namespace {

// Total gates over all N! walks; the estimate is the ensemble velocity
// N * (distance per walk) / (mean time per walk) = N^2 * count / total.
std::int64_t enumerate_exact(int N, std::int64_t& count) {
  std::vector<int> perm(N);
  for (int i = 0; i < N; ++i) perm[i] = i;
  std::int64_t total = 0;
  count = 0;
  do {
    total += drift_of_permutation(N, perm).gates;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace

DriftEstimate typical_drift(int N, std::int64_t n_samples, std::uint64_t seed) {
  if (N < 2) throw std::invalid_argument("typical_drift: N < 2");
  const double nn = static_cast<double>(N) * N;
  // N! <= 4e6 holds exactly for N <= 10.
  double factorial = 1.0;
  for (int i = 2; i <= N; ++i) factorial *= i;
  if (factorial <= 4e6) {
    DriftEstimate e{};
    const std::int64_t total = enumerate_exact(N, e.n);
    e.mean = nn * static_cast<double>(e.n) / static_cast<double>(total);
    e.stderr_ = 0.0;
    e.exact = true;
    return e;
  }
  if (n_samples < 2) throw std::invalid_argument("typical_drift: n_samples < 2");
  Rng rng(seed);
  std::int64_t total = 0;
  double sum2 = 0.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const auto perm = rng.permutation(N);
    const std::int64_t g = drift_of_permutation(N, perm).gates;
    total += g;
    sum2 += static_cast<double>(g) * static_cast<double>(g);
  }
  DriftEstimate e{};
  e.n = n_samples;
  const double ns = static_cast<double>(n_samples);
  const double g_bar = static_cast<double>(total) / ns;
  e.mean = nn / g_bar;
  // Delta method: nu = N^2/g_bar, so stderr(nu) = nu * stderr(g_bar)/g_bar.
  const double var_g =
      (sum2 - static_cast<double>(total) * g_bar) / (ns - 1.0);
  e.stderr_ = e.mean * std::sqrt(std::max(0.0, var_g) / ns) / g_bar;
  e.exact = false;
  return e;
}

}  // namespace floq
