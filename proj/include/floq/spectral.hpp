// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "floq/circuit.hpp"
#include "floq/rng.hpp"
#include "floq/sector_space.hpp"

namespace floq {

/// Configuration of the polynomially filtered eigensolver.
struct PolfedConfig {
  double phi_target = 0.0;  ///< eigenphase region to resolve
  int filter_order = 0;     ///< K; 0 -> default_filter_order rule
  int n_eigs = 0;           ///< requested pairs; 0 -> default rule
  double tol = 1e-8;        ///< residual acceptance ||Ux - e^{-i phi} x||
  std::int64_t max_matvecs = 0;  ///< filter applications cap; 0 -> 300*n_eigs
  int subspace = 0;         ///< Krylov size per restart; 0 -> auto
  int filter_power = 1;     ///< Arnoldi operator = (filter)^power
  bool keep_vectors = true;
};

/// Default sizing: n_eigs = min(d/10, 750) (integer division) and
/// K = ceil(0.4 d / n_eigs_default).  Requires d >= 10.
struct DefaultFilter {
  int n_eigs = 0;
  int filter_order = 0;
};
DefaultFilter default_filter_order(std::int64_t d);

/// In-place v <- sum_{k=0}^{K} e^{-ik phi_target} U^k v using K circuit
/// applications and a running phase; no matrix is formed.  At
/// phi_target = 0 this is the Dirichlet kernel, amplifying eigenphases
/// near 0 by a factor up to K + 1.
void apply_polfed(const CircuitKernel& kernel, SectorState& v, int order,
                  double phi_target);

/// Closed-form filter gain on a U-eigenvector with eigenvalue e^{-i phi}:
/// sum_{k=0}^{K} e^{-ik(phi_target + phi)} (geometric sum).
std::complex<double> polfed_gain(int order, double phi_target, double phi);

/// Eigenpairs of the Floquet unitary near phi_target.
struct SpectralResult {
  std::vector<double> eigenphases;      ///< sorted ascending in (-pi, pi]
  std::vector<double> residuals;        ///< parallel to eigenphases
  std::vector<SectorState> vectors;     ///< parallel; empty if not kept
  std::vector<double> gap_ratios;       ///< filled by spectral_diagnostics
  std::vector<double> entropies;        ///< filled by spectral_diagnostics
  std::int64_t matvecs = 0;             ///< filter applications spent
  bool converged = false;               ///< all requested pairs locked
};

/**
 * Implicitly deflated, thick-restarted Arnoldi on the polynomial filter.
 *
 * Each pass extends a Krylov space of the filtered operator, keeping the
 * leading unconverged Ritz directions from the previous pass as an exact
 * carried-over factorization (so convergence accumulates across
 * restarts).  Candidates whose factorization residual estimate is within
 * reach of tol are formed explicitly (rotating clusters with equal
 * filter eigenvalue against U itself), refined against U
 * (phi = -Arg<x|U|x>), and locked when the true residual
 * ||U x - e^{-i phi} x|| falls below tol.  Stops when n_eigs pairs are
 * locked, the matvec cap is hit, or neither locks nor estimate progress
 * happen for several passes; partial results are returned with
 * converged = false.  Phases are the n_eigs locked ones nearest
 * phi_target, sorted ascending.
 */
SpectralResult arnoldi_eigenpairs(const CircuitKernel& kernel,
                                  const PolfedConfig& config, Rng& rng);

/// Consecutive-gap ratios of sorted phases (one sector): for interior i,
/// r_i = min(d_{i-1}, d_i) / max(d_{i-1}, d_i) with d_i = phi_{i+1} - phi_i.
/// The wrap-around gap is excluded; duplicate phases yield r = 0.
/// Requires >= 3 phases, sorted ascending.
std::vector<double> gap_ratios(const std::vector<double>& phases);

/// Entanglement entropy of the contiguous cut A = sites {0..N_A-1}:
/// -sum s^2 ln s^2 over Schmidt values, computed blockwise per subsystem
/// magnetization (each block reshaped to d_A(M_A) x d_B and SVD'd), which
/// equals the full-space result.
double entanglement_entropy(const SectorState& psi, int N_A);

/// Page value ln d_A - d_A^2 / (2 d) for subsystem/full dimensions.
double page_entropy(double d_A, double d);

/// arnoldi_eigenpairs + gap ratios + per-eigenvector entropies at cut N_A.
/// Vectors are dropped afterwards unless config.keep_vectors.
SpectralResult spectral_diagnostics(const CircuitKernel& kernel,
                                    const PolfedConfig& config, Rng& rng,
                                    int N_A);

}  // namespace floq
