// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/circuit.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "floq/rng.hpp"

namespace floq {

FloquetCircuit sample_circuit(int N, double J, double Jz, std::uint64_t seed) {
  if (N < 2) throw std::invalid_argument("sample_circuit: N must be >= 2");
  constexpr double pi = std::numbers::pi;
  FloquetCircuit c;
  c.N = N;
  c.J = J;
  c.Jz = Jz;
  c.seed = seed;
  c.bonds.resize(static_cast<std::size_t>(N));
  Rng rng(seed);
  for (int b = 0; b < N; ++b) {
    GateParams g;
    g.J = J;
    g.Jz = Jz;
    g.h = rng.uniform(-pi, pi);
    g.h_prime = rng.uniform(-pi, pi);
    g.phi = rng.uniform(-pi, pi);
    c.bonds[static_cast<std::size_t>(b)] = g;
  }
  c.perm = rng.permutation(N);
  return c;
}

BondTables::BondTables(const SectorBasis& basis) {
  const int N = basis.N();
  const auto& states = basis.states();
  const std::int64_t d = basis.dim();
  bonds_.resize(static_cast<std::size_t>(N));
  for (int b = 0; b < N; ++b) {
    auto& tb = bonds_[static_cast<std::size_t>(b)];
    const int s0 = b;
    const int s1 = (b + 1) % N;
    const std::uint32_t m0 = 1u << s0;
    const std::uint32_t m1 = 1u << s1;
    for (std::int64_t i = 0; i < d; ++i) {
      const std::uint32_t x = states[static_cast<std::size_t>(i)];
      const bool up0 = (x & m0) != 0;
      const bool up1 = (x & m1) != 0;
      if (up0 && up1) {
        tb.diag_uu.push_back(static_cast<std::uint32_t>(i));
      } else if (!up0 && !up1) {
        tb.diag_dd.push_back(static_cast<std::uint32_t>(i));
      } else if (up0) {
        // |...up_{s0} down_{s1}...> = "ud" in the bond's local basis.
        const std::uint32_t y = (x ^ m0) | m1;
        tb.pair_ud.push_back(static_cast<std::uint32_t>(i));
        tb.pair_du.push_back(static_cast<std::uint32_t>(basis.rank(y)));
      }
      // up1-only states are reached as the partner of an up0-only state.
    }
  }
}

CircuitKernel::CircuitKernel(const FloquetCircuit& circuit,
                             std::shared_ptr<const SectorBasis> basis,
                             std::shared_ptr<const BondTables> tables,
                             std::size_t table_budget_bytes)
    : circuit_(circuit), basis_(std::move(basis)), tables_(std::move(tables)) {
  if (!basis_) throw std::invalid_argument("CircuitKernel: null basis");
  if (circuit_.N != basis_->N())
    throw std::invalid_argument("CircuitKernel: circuit/basis size mismatch");
  if (static_cast<int>(circuit_.bonds.size()) != circuit_.N ||
      static_cast<int>(circuit_.perm.size()) != circuit_.N)
    throw std::invalid_argument("CircuitKernel: malformed circuit");
  blocks_.reserve(circuit_.bonds.size());
  for (const auto& g : circuit_.bonds) blocks_.push_back(central_block(g));
  if (!tables_) {
    // Rough cost: ~one uint32 per (bond, state); build only within budget.
    const double bytes = 4.0 * static_cast<double>(circuit_.N) *
                         static_cast<double>(basis_->dim());
    if (bytes <= static_cast<double>(table_budget_bytes))
      tables_ = std::make_shared<BondTables>(*basis_);
  } else if (tables_->N() != circuit_.N) {
    throw std::invalid_argument("CircuitKernel: tables built for different N");
  }
}

void CircuitKernel::apply_bond_direct(
    int bond, const CentralBlock& blk,
    std::vector<std::complex<double>>& a) const {
  const int N = circuit_.N;
  const int s0 = bond;
  const int s1 = (bond + 1) % N;
  const std::uint32_t m0 = 1u << s0;
  const std::uint32_t m1 = 1u << s1;
  const auto& states = basis_->states();
  const std::int64_t d = basis_->dim();
  for (std::int64_t i = 0; i < d; ++i) {
    const std::uint32_t x = states[static_cast<std::size_t>(i)];
    const bool up0 = (x & m0) != 0;
    const bool up1 = (x & m1) != 0;
    if (up0 && up1) {
      a[static_cast<std::size_t>(i)] *= blk.uu;
    } else if (!up0 && !up1) {
      a[static_cast<std::size_t>(i)] *= blk.dd;
    } else if (up0) {
      const std::uint32_t y = (x ^ m0) | m1;  // the "du" partner
      const std::int64_t j = basis_->rank(y);
      const std::complex<double> aud = a[static_cast<std::size_t>(i)];
      const std::complex<double> adu = a[static_cast<std::size_t>(j)];
      a[static_cast<std::size_t>(i)] = blk.c00 * aud + blk.c01 * adu;
      a[static_cast<std::size_t>(j)] = blk.c10 * aud + blk.c11 * adu;
    }
  }
}

void CircuitKernel::apply(SectorState& psi) const {
  if (psi.basis.get() != basis_.get() &&
      (psi.basis->N() != basis_->N() || psi.basis->n_up() != basis_->n_up()))
    throw std::invalid_argument("CircuitKernel::apply: state in wrong sector");
  auto& a = psi.amp;
  for (int step = 0; step < circuit_.N; ++step) {
    const int b = circuit_.perm[static_cast<std::size_t>(step)];
    const CentralBlock& blk = blocks_[static_cast<std::size_t>(b)];
    if (tables_) {
      const BondTables::Bond& tb = tables_->bond(b);
      for (const std::uint32_t i : tb.diag_uu) a[i] *= blk.uu;
      for (const std::uint32_t i : tb.diag_dd) a[i] *= blk.dd;
      const std::size_t np = tb.pair_ud.size();
      for (std::size_t k = 0; k < np; ++k) {
        const std::uint32_t i = tb.pair_ud[k];
        const std::uint32_t j = tb.pair_du[k];
        const std::complex<double> aud = a[i];
        const std::complex<double> adu = a[j];
        a[i] = blk.c00 * aud + blk.c01 * adu;
        a[j] = blk.c10 * aud + blk.c11 * adu;
      }
    } else {
      apply_bond_direct(b, blk, a);
    }
  }
}

void CircuitKernel::apply_power(SectorState& psi, std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("apply_power: negative power");
  for (std::int64_t t = 0; t < k; ++t) apply(psi);
}

void apply_floquet(const FloquetCircuit& circuit, SectorState& psi) {
  CircuitKernel(circuit, psi.basis).apply(psi);
}

void apply_floquet_power(const FloquetCircuit& circuit, SectorState& psi,
                         std::int64_t k) {
  CircuitKernel(circuit, psi.basis).apply_power(psi, k);
}

SectorState cyclic_shift(const SectorState& psi) {
  const auto& basis = *psi.basis;
  const int N = basis.N();
  const std::uint32_t mask = (N == 32) ? ~0u : ((1u << N) - 1u);
  SectorState out{psi.basis,
                  std::vector<std::complex<double>>(psi.amp.size(), 0.0)};
  const std::int64_t d = basis.dim();
  for (std::int64_t i = 0; i < d; ++i) {
    const std::uint32_t x = basis.states()[static_cast<std::size_t>(i)];
    const std::uint32_t y =
        ((x << 1) | (x >> (N - 1))) & mask;  // site n -> site n+1
    out.amp[static_cast<std::size_t>(basis.rank(y))] =
        psi.amp[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace floq
