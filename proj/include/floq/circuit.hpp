// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "floq/gates.hpp"
#include "floq/sector_space.hpp"

namespace floq {

/**
 * One disorder realization of the Floquet circuit: N bond gates on a ring
 * (bond b couples sites b and (b+1) mod N), all sharing (J, Jz), with
 * i.i.d. uniform [-pi, pi) phases h, h', phi per bond, applied once per
 * period in the order given by perm (perm[0] acts first).
 */
struct FloquetCircuit {
  int N = 0;
  double J = 0.0;
  double Jz = 0.0;
  std::uint64_t seed = 0;
  std::vector<GateParams> bonds;  ///< size N, indexed by bond
  std::vector<int> perm;          ///< application order of bond indices
};

/// Draw a circuit: for each bond b = 0..N-1 in order, h_b, h'_b, phi_b are
/// drawn uniform [-pi, pi); then perm is a uniform permutation.  The draw
/// order is part of the reproducibility contract.
FloquetCircuit sample_circuit(int N, double J, double Jz, std::uint64_t seed);

/**
 * Per-bond index tables for a sector basis: the ranks of the polarized
 * (uu/dd) configurations and of each (ud, du) partner pair.  Pure geometry
 * (independent of gate parameters), so one instance can be shared, const,
 * across every circuit and worker operating in the same sector.
 * Memory: ~4 bytes per (bond, basis state).
 */
class BondTables {
 public:
  explicit BondTables(const SectorBasis& basis);

  struct Bond {
    std::vector<std::uint32_t> diag_uu, diag_dd;
    std::vector<std::uint32_t> pair_ud, pair_du;  // parallel arrays
  };

  const Bond& bond(int b) const { return bonds_[b]; }
  int N() const { return static_cast<int>(bonds_.size()); }

 private:
  std::vector<Bond> bonds_;
};

/**
 * Sector-restricted application engine for one (circuit, basis) pair.
 *
 * Uses the closed-form block coefficients per bond; with index tables one
 * Floquet period costs O(N * d).  Without tables (over budget or opted
 * out) partners are ranked on the fly at the same asymptotic cost but a
 * larger constant.  Instances are cheap; give each worker its own.
 */
class CircuitKernel {
 public:
  /// tables may be null: then the kernel builds its own if the memory
  /// budget allows, else falls back to the direct path.
  CircuitKernel(const FloquetCircuit& circuit,
                std::shared_ptr<const SectorBasis> basis,
                std::shared_ptr<const BondTables> tables = nullptr,
                std::size_t table_budget_bytes = 256u << 20);

  const std::shared_ptr<const SectorBasis>& basis() const { return basis_; }
  const FloquetCircuit& circuit() const { return circuit_; }

  /// One Floquet period in place.
  void apply(SectorState& psi) const;

  /// k Floquet periods in place (k >= 0).
  void apply_power(SectorState& psi, std::int64_t k) const;

  bool uses_tables() const { return tables_ != nullptr; }

 private:
  void apply_bond_direct(int bond, const CentralBlock& b,
                         std::vector<std::complex<double>>& a) const;

  FloquetCircuit circuit_;
  std::shared_ptr<const SectorBasis> basis_;
  std::shared_ptr<const BondTables> tables_;
  std::vector<CentralBlock> blocks_;  // per bond
};

/// Convenience wrappers building a throwaway kernel; use CircuitKernel
/// directly in hot loops.
void apply_floquet(const FloquetCircuit& circuit, SectorState& psi);
void apply_floquet_power(const FloquetCircuit& circuit, SectorState& psi,
                         std::int64_t k);

/// Translate the state by one site (site n -> site n+1, periodic).
SectorState cyclic_shift(const SectorState& psi);

}  // namespace floq
