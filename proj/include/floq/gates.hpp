// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace floq {

/// Parameters of one two-qubit bond gate.  All gates of a circuit share
/// (J, Jz); the three phases are the per-bond disorder.
struct GateParams {
  double J = 0.0;
  double Jz = 0.0;
  double h = 0.0;
  double h_prime = 0.0;
  double phi = 0.0;
};

/// 4x4 unitary in the two-site basis ordered (dd, ud, du, uu), where "ud"
/// means first site (n) up, second site (n+1) down.
using TwoQubitGate = Eigen::Matrix4cd;

/**
 * Compact form of the gate exploiting its U(1) block structure: diagonal
 * phases on the polarized configurations and a 2x2 unitary on the
 * (ud, du) pair.  This is what the sector kernels consume.
 */
struct CentralBlock {
  std::complex<double> uu, dd;             // diagonal phases
  std::complex<double> c00, c01, c10, c11; // central block, rows/cols (ud, du)
};

/// Closed-form evaluation of the bond gate: the z-field rotations applied
/// first, then the exponential of the hopping+Ising bond Hamiltonian,
/// evaluated analytically on each magnetization block (no generic expm).
CentralBlock central_block(const GateParams& g);

/// Assemble the full 4x4 gate matrix from the closed form.
TwoQubitGate build_gate(const GateParams& g);

/**
 * At J = pi the gate degenerates to a generalized SWAP: pure phases on the
 * polarized states and pure off-diagonal phases on the central pair,
 *
 *   U = e^{-i kappa_plus}|uu><uu| + e^{-i xi_plus}|du><ud|
 *     + e^{-i xi_minus}|ud><du|  + e^{-i kappa_minus}|dd><dd|,
 *
 * with kappa_pm = +-(h + h')/2 + Jz/4 and
 *      xi_pm    = pi/2 +- ((h - h')/2 + phi) - Jz/4.
 * The assembled matrix equals build_gate(J=pi, ...) exactly.
 */
struct SwapForm {
  double kappa_plus, kappa_minus, xi_plus, xi_minus;
  TwoQubitGate matrix() const;
};

SwapForm swap_form(double h, double h_prime, double phi, double Jz);

/**
 * Reduce the four-phase gate parameterization (z-rotations by theta_1,
 * theta_2 before and theta_3, theta_4 after the symmetric XX+YY+ZZ core)
 * to the three-phase form: phi = theta_2 - theta_1, h = theta_1 + theta_3,
 * h' = theta_2 + theta_4.  build_gate of the result equals the four-phase
 * gate up to a global phase.
 */
GateParams from_four_phases(const std::array<double, 4>& theta, double J,
                            double Jz);

}  // namespace floq
