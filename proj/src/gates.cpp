// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/gates.hpp"

#include <cmath>
#include <numbers>

namespace floq {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

CentralBlock central_block(const GateParams& g) {
  // U = exp(-i H) * exp(-i h Sz_n) * exp(-i h' Sz_{n+1}) with
  // H = (J/2)(S+ S- e^{i phi} + S- S+ e^{-i phi}) + Jz Sz Sz.
  //
  // On the polarized states H is the scalar Jz/4 and the fields add
  // -+(h + h')/2; on the (ud, du) pair H = -Jz/4 + (J/2) * (phase flip),
  // whose exponential is cos(J/2) - i sin(J/2) * (phase flip).
  const double c = std::cos(g.J / 2.0);
  const double s = std::sin(g.J / 2.0);
  const double delta = (g.h - g.h_prime) / 2.0;
  const std::complex<double> zz = std::exp(kI * (g.Jz / 4.0));
  CentralBlock b;
  b.uu = std::exp(-kI * (g.Jz / 4.0 + (g.h + g.h_prime) / 2.0));
  b.dd = std::exp(-kI * (g.Jz / 4.0 - (g.h + g.h_prime) / 2.0));
  b.c00 = zz * c * std::exp(-kI * delta);
  b.c01 = zz * (-kI) * s * std::exp(kI * (g.phi + delta));
  b.c10 = zz * (-kI) * s * std::exp(-kI * (g.phi + delta));
  b.c11 = zz * c * std::exp(kI * delta);
  return b;
}

TwoQubitGate build_gate(const GateParams& g) {
  const CentralBlock b = central_block(g);
  TwoQubitGate u = TwoQubitGate::Zero();
  u(0, 0) = b.dd;
  u(1, 1) = b.c00;
  u(1, 2) = b.c01;
  u(2, 1) = b.c10;
  u(2, 2) = b.c11;
  u(3, 3) = b.uu;
  return u;
}

TwoQubitGate SwapForm::matrix() const {
  TwoQubitGate u = TwoQubitGate::Zero();
  u(0, 0) = std::exp(-kI * kappa_minus);
  u(3, 3) = std::exp(-kI * kappa_plus);
  u(2, 1) = std::exp(-kI * xi_plus);   // |du><ud|
  u(1, 2) = std::exp(-kI * xi_minus);  // |ud><du|
  return u;
}

SwapForm swap_form(double h, double h_prime, double phi, double Jz) {
  SwapForm f;
  f.kappa_plus = (h + h_prime) / 2.0 + Jz / 4.0;
  f.kappa_minus = -(h + h_prime) / 2.0 + Jz / 4.0;
  f.xi_plus = std::numbers::pi / 2.0 + ((h - h_prime) / 2.0 + phi) - Jz / 4.0;
  f.xi_minus = std::numbers::pi / 2.0 - ((h - h_prime) / 2.0 + phi) - Jz / 4.0;
  return f;
}

GateParams from_four_phases(const std::array<double, 4>& theta, double J,
                            double Jz) {
  GateParams g;
  g.J = J;
  g.Jz = Jz;
  g.phi = theta[1] - theta[0];
  g.h = theta[0] + theta[2];
  g.h_prime = theta[1] + theta[3];
  return g;
}

}  // namespace floq
