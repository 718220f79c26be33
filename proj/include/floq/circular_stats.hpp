// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

namespace floq {

/// Site angles theta_n = 2*pi*(n - N/2)/N mapped to (-pi, pi] (the full
/// ring maps onto the full circle; site N/2 sits at angle 0).
std::vector<double> site_angles(int N);

/// Background magnetization per site once the tagged excitation at the
/// center is excluded: M_B = (M - 1/2)/(N - 1).
double background_magnetization(int N, int M);

/// Quasi-probability over sites: p_n = 2*(M_n - M_B)/(1 - 2*M_B).
/// Sums to 1 whenever the profile sums to M (unit-norm states).  Entries
/// may be negative; this is a signed distribution.
struct QuasiProb {
  std::vector<double> p;
  std::vector<double> theta;
};

QuasiProb quasiprob(const std::vector<double>& profile, double m_background);

/// First circular moment R = sum_n p_n e^{i theta_n}, circular mean
/// mu = Arg R and circular spread sigma = sqrt(-2 ln |R|) (clamped to 0
/// when |R| > 1, which signed p can produce).  |R| below 1e-15 gives the
/// degenerate flag, sigma = +inf and mu = 0.
struct CircularMoment {
  std::complex<double> R;
  double mu;
  double sigma;
  bool degenerate;
};

CircularMoment circular_mean(const QuasiProb& q);

/// Folded first moment mu_tilde = Arg sum_n p_n e^{i |theta_n|}; the rate
/// of change of mu_tilde tracks transport that is symmetric about the
/// starting site (both ballistic fronts move the fold the same way).
double drift_mu_tilde(const QuasiProb& q);

/// Wrapped normal density at theta (mean mu, spread sigma), truncated at
/// |k| <= k_max images: (1/(sigma sqrt(2 pi))) sum_k exp(-(theta - mu +
/// 2 pi k)^2 / (2 sigma^2)).
double wrapped_normal_pdf(double theta, double mu, double sigma, int k_max);

/// k_max making the truncated image tail smaller than 1e-14 anywhere on
/// the circle.
int wrapped_normal_k_max(double sigma);

/// Overload choosing k_max automatically.
double wrapped_normal_pdf(double theta, double mu, double sigma);

/// Discrete wrapped normal on the N site angles (mean 0): q_n proportional
/// to sum_k exp(-(theta_n + 2 pi k)^2/(2 sigma^2)), normalized to sum 1.
std::vector<double> discrete_wrapped_normal(int N, double sigma);

}  // namespace floq
