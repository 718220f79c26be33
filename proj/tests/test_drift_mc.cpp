// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "floq/drift_mc.hpp"
#include "floq/rng.hpp"

using namespace floq;

namespace {

/// Reference walker, transcribed independently: the excitation starts at
/// site N/2 and an unwrapped displacement x accumulates +-1 as bonds carry
/// it; the walk ends when |x| = N (one full winding), after g gates, with
/// drift N^2 / g.
struct OracleWalk {
  double drift;
  long long gates;
};

OracleWalk oracle_walk(int N, const std::vector<int>& perm) {
  std::vector<std::pair<int, int>> touch;
  touch.reserve(perm.size());
  for (const int b : perm) touch.emplace_back(b, (b + 1) % N);

  int site = N / 2;
  long long x = 0, gates = 0;
  while (true) {
    for (const auto& [lo, hi] : touch) {
      ++gates;
      if (site == lo) {
        site = hi;
        ++x;
      } else if (site == hi) {
        site = lo;
        --x;
      }
      if (x == N || x == -N)
        return {static_cast<double>(N) * N / static_cast<double>(gates),
                gates};
    }
  }
}

}  // namespace

TEST_CASE("typical_drift: frozen exact enumeration values") {
  // Ensemble velocity N^2 * N! / sum(gates); the totals reduce to small
  // rationals: 16*24/192 = 2, 36*720/12720 = 108/53, 64*40320/1263360 =
  // 96/47 (and N = 10 gives exactly 100/49).
  const DriftEstimate e4 = typical_drift(4, 0, 0);
  CHECK(e4.exact);
  CHECK(e4.n == 24);
  CHECK(e4.stderr_ == 0.0);
  CHECK(e4.mean == doctest::Approx(2.0).epsilon(1e-14));

  const DriftEstimate e6 = typical_drift(6, 0, 0);
  CHECK(e6.exact);
  CHECK(e6.n == 720);
  CHECK(e6.mean == doctest::Approx(108.0 / 53.0).epsilon(1e-14));

  const DriftEstimate e8 = typical_drift(8, 0, 0);
  CHECK(e8.exact);
  CHECK(e8.n == 40320);
  CHECK(e8.mean == doctest::Approx(96.0 / 47.0).epsilon(1e-14));
}

TEST_CASE("typical_drift: exact values match the independent enumerator") {
  for (const int N : {4, 5, 6}) {
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    long long total_gates = 0;
    std::int64_t count = 0;
    do {
      total_gates += oracle_walk(N, perm).gates;
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));

    const DriftEstimate e = typical_drift(N, 0, 0);
    CHECK(e.exact);
    CHECK(e.n == count);
    const double expect = static_cast<double>(N) * N *
                          static_cast<double>(count) /
                          static_cast<double>(total_gates);
    CHECK(e.mean == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("staircase orderings: exact extremal drifts") {
  for (const int N : {4, 8, 12, 20}) {
    const WalkResult fast = drift_of_permutation(N, staircase_permutation(N));
    CHECK(fast.drift == doctest::Approx(static_cast<double>(N)));
    CHECK(fast.gates == N);

    const WalkResult slow =
        drift_of_permutation(N, reversed_staircase_permutation(N));
    const double expect =
        static_cast<double>(N) * N / (static_cast<double>(N) * N - 2 * N + 2);
    CHECK(slow.drift == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("drift_of_permutation: agrees with the oracle on random draws") {
  Rng rng(301);
  for (const int N : {4, 7, 12, 21 - 5}) {
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<int> perm = rng.permutation(N);
      const WalkResult w = drift_of_permutation(N, perm);
      const OracleWalk o = oracle_walk(N, perm);
      CHECK(w.gates == o.gates);
      CHECK(w.drift == doctest::Approx(o.drift).epsilon(1e-14));
      CHECK(w.drift == doctest::Approx(static_cast<double>(N) * N / w.gates));
      // Winding needs at least N carrying gates, so drift never exceeds N.
      // (There is no matching lower bound: orderings slower than the
      // reversed staircase exist among general permutations.)
      CHECK(w.drift <= N + 1e-12);
      CHECK(w.drift > 0.0);
    }
  }
}

TEST_CASE("typical_drift: Monte Carlo branch is seeded and consistent") {
  const DriftEstimate a = typical_drift(12, 20000, 77);
  const DriftEstimate b = typical_drift(12, 20000, 77);
  const DriftEstimate c = typical_drift(12, 20000, 78);

  CHECK(!a.exact);
  CHECK(a.n == 20000);
  CHECK(a.stderr_ > 0.0);
  CHECK(a.mean == b.mean);      // identical seed, identical estimate
  CHECK(a.stderr_ == b.stderr_);
  CHECK(a.mean != c.mean);

  // Independent seeds agree within combined 5-sigma statistics.
  CHECK(std::abs(a.mean - c.mean) < 5.0 * (a.stderr_ + c.stderr_));
  // And sit near the large-N asymptote ~2 already at N=12 (≈2.039).
  CHECK(a.mean == doctest::Approx(2.04).epsilon(0.01));
}

TEST_CASE("argument validation") {
  CHECK_THROWS(drift_of_permutation(1, {0}));
  CHECK_THROWS(drift_of_permutation(4, {0, 1, 2}));      // wrong size
  CHECK_THROWS(drift_of_permutation(4, {0, 1, 2, 2}));   // repeated bond
  CHECK_THROWS(drift_of_permutation(4, {0, 1, 2, 4}));   // out of range
  CHECK_THROWS(typical_drift(1, 100, 0));
  CHECK_THROWS(typical_drift(12, 1, 0));  // MC with too few samples
}
