// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/sector_space.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace floq {

namespace {

// Pascal triangle up to n = 64; C(64, 32) < 2^63 so everything fits.
struct BinomialTable {
  std::array<std::array<std::uint64_t, 65>, 65> c{};
  BinomialTable() {
    for (int n = 0; n <= 64; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k)
        c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
    }
  }
};
const BinomialTable kBinom;

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > 64) throw std::invalid_argument("binomial: n out of [0,64]");
  if (k < 0 || k > n) return 0;
  return kBinom.c[n][k];
}

std::uint64_t sector_dimension(int N, int M) {
  if (N < 2 || N > 64 || N % 2 != 0)
    throw std::invalid_argument("sector_dimension: N must be even, 2..64");
  const int n_up = N / 2 + M;
  if (n_up < 0 || n_up > N)
    throw std::invalid_argument("sector_dimension: empty sector (|M| > N/2)");
  return binomial(N, n_up);
}

SectorBasis::SectorBasis(int N, int M) : N_(N), n_up_(N / 2 + M) {
  if (N < 2 || N % 2 != 0)
    throw std::invalid_argument("SectorBasis: N must be even and >= 2");
  if (N > 28)
    throw std::invalid_argument("SectorBasis: N > 28 exceeds enumeration cap");
  if (n_up_ < 0 || n_up_ > N)
    throw std::invalid_argument("SectorBasis: empty sector (|M| > N/2)");
  const std::uint64_t d = binomial(N, n_up_);
  states_.reserve(d);
  if (n_up_ == 0) {
    states_.push_back(0);
  } else {
    // Enumerate same-popcount integers in increasing order (Gosper's hack).
    std::uint32_t x = (1u << n_up_) - 1u;
    const std::uint32_t limit = (N == 32) ? ~0u : ((1u << N) - 1u);
    while (true) {
      states_.push_back(x);
      if (states_.size() == d) break;
      const std::uint32_t c = x & (~x + 1u);
      const std::uint32_t r = x + c;
      x = (((r ^ x) >> 2) / c) | r;
      if (x > limit) break;
    }
  }
}

std::int64_t combinadic_rank(std::uint32_t bits) {
  std::int64_t r = 0;
  int j = 0;
  while (bits != 0u) {
    const int p = std::countr_zero(bits);
    ++j;
    r += static_cast<std::int64_t>(kBinom.c[p][j]);
    bits &= bits - 1u;
  }
  return r;
}

std::int64_t SectorBasis::rank(std::uint32_t bits) const {
  return combinadic_rank(bits);
}

double SectorState::norm2() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return s;
}

void SectorState::normalize() {
  const double n = std::sqrt(norm2());
  if (n == 0.0) throw std::runtime_error("SectorState: cannot normalize zero");
  const double inv = 1.0 / n;
  for (auto& a : amp) a *= inv;
}

SectorState random_sector_state(std::shared_ptr<const SectorBasis> basis,
                                Rng& rng) {
  SectorState psi{std::move(basis), {}};
  psi.amp.resize(psi.basis->dim());
  for (auto& a : psi.amp) a = rng.gaussian_complex();
  psi.normalize();
  return psi;
}

SectorState random_phase_state(std::shared_ptr<const SectorBasis> basis,
                               Rng& rng) {
  SectorState psi{std::move(basis), {}};
  const std::int64_t d = psi.basis->dim();
  psi.amp.resize(d);
  const double mod = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& a : psi.amp) {
    const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
    a = std::polar(mod, th);
  }
  return psi;
}

std::optional<ProjectedState> project_up(const SectorState& psi, int site) {
  if (site < 0 || site >= psi.basis->N())
    throw std::invalid_argument("project_up: site out of range");
  const std::uint32_t mask = 1u << site;
  double w = 0.0;
  for (std::int64_t i = 0; i < psi.basis->dim(); ++i)
    if (psi.basis->state(i) & mask) w += std::norm(psi.amp[i]);
  if (w == 0.0) return std::nullopt;
  ProjectedState out{SectorState{psi.basis, psi.amp}, w};
  const double inv = 1.0 / std::sqrt(w);
  for (std::int64_t i = 0; i < psi.basis->dim(); ++i) {
    if (psi.basis->state(i) & mask)
      out.state.amp[i] *= inv;
    else
      out.state.amp[i] = 0.0;
  }
  return out;
}

std::vector<double> measure_profile(const SectorState& psi) {
  const int N = psi.basis->N();
  std::vector<double> m(N, 0.0);
  double total = 0.0;
  for (std::int64_t i = 0; i < psi.basis->dim(); ++i) {
    const double w = std::norm(psi.amp[i]);
    total += w;
    std::uint32_t bits = psi.basis->state(i);
    while (bits != 0u) {
      const int n = std::countr_zero(bits);
      m[n] += w;
      bits &= bits - 1u;
    }
  }
  // m[n] currently holds the up-weight; shift by -1/2 per unit of norm.
  for (int n = 0; n < N; ++n) m[n] -= 0.5 * total;
  return m;
}

}  // namespace floq
