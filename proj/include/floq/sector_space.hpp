// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "floq/rng.hpp"

namespace floq {

/// Exact binomial coefficient C(n, k) for 0 <= n <= 64 (0 for k < 0 or k > n).
std::uint64_t binomial(int n, int k);

/// Combinadic rank of a bitstring among all bitstrings sharing its popcount,
/// ordered by increasing integer value: rank = sum_j C(p_j, j) where p_j is
/// the 0-based position of the j-th set bit (j counted from 1).
std::int64_t combinadic_rank(std::uint32_t bits);

/**
 * Basis of the fixed-magnetization sector of an N-site spin-1/2 ring.
 *
 * Basis states are bitstrings where bit n (site 0 = least significant bit)
 * is 1 for spin-up.  The sector with magnetization M holds the strings with
 * popcount N/2 + M, ordered lexicographically by integer value.  Ranking is
 * the combinadic bijection, so rank/unrank need no search.
 */
class SectorBasis {
 public:
  /// N must be even and at most 28 (enumeration cap); n_up = N/2 + M must
  /// lie in [0, N].  Throws std::invalid_argument otherwise.
  SectorBasis(int N, int M);

  int N() const { return N_; }
  int M() const { return n_up_ - N_ / 2; }
  int n_up() const { return n_up_; }
  std::int64_t dim() const { return static_cast<std::int64_t>(states_.size()); }

  std::uint32_t state(std::int64_t r) const { return states_[r]; }
  const std::vector<std::uint32_t>& states() const { return states_; }

  /// Combinadic rank of a bitstring within this sector (must have the
  /// sector's popcount).
  std::int64_t rank(std::uint32_t bits) const;

  /// Inverse of rank.
  std::uint32_t unrank(std::int64_t r) const { return states_[r]; }

 private:
  int N_;
  int n_up_;
  std::vector<std::uint32_t> states_;
};

/// Dimension C(N, N/2 + M) of the magnetization-M sector. Throws if the
/// sector is empty/invalid or if N is odd or N > 64.
std::uint64_t sector_dimension(int N, int M);

/// Sector state: amplitudes over a shared SectorBasis.
struct SectorState {
  std::shared_ptr<const SectorBasis> basis;
  std::vector<std::complex<double>> amp;

  double norm2() const;
  void normalize();
};

/// Haar-like random state: i.i.d. complex-Gaussian amplitudes, normalized.
SectorState random_sector_state(std::shared_ptr<const SectorBasis> basis,
                                Rng& rng);

/// Random state with equal-modulus amplitudes and i.i.d. uniform phases.
/// Under permutation-like (J = pi) dynamics the moduli are preserved, so
/// such states realize sharp single-site occupation profiles exactly.
SectorState random_phase_state(std::shared_ptr<const SectorBasis> basis,
                               Rng& rng);

struct ProjectedState {
  SectorState state;  ///< renormalized, supported on strings with the site up
  double weight;      ///< weight of the up-component before renormalization
};

/// Project onto "site up", renormalize.  Returns nullopt when the state has
/// no weight on that component (weight == 0).
std::optional<ProjectedState> project_up(const SectorState& psi, int site);

/// Magnetization profile M_n = sum_i |c_i|^2 (bit_n(i) - 1/2), one entry per
/// site.  The entries sum to the sector magnetization M for any unit state.
std::vector<double> measure_profile(const SectorState& psi);

}  // namespace floq
