// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/circular_stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace floq {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateR = 1e-15;
}  // namespace

std::vector<double> site_angles(int N) {
  if (N < 2) throw std::invalid_argument("site_angles: N < 2");
  std::vector<double> th(N);
  for (int n = 0; n < N; ++n) {
    double t = 2.0 * kPi * (n - N / 2) / N;
    if (t <= -kPi) t += 2.0 * kPi;  // map onto (-pi, pi]
    th[n] = t;
  }
  return th;
}

double background_magnetization(int N, int M) {
  if (N < 2) throw std::invalid_argument("background_magnetization: N < 2");
  return (M - 0.5) / (N - 1);
}

QuasiProb quasiprob(const std::vector<double>& profile, double m_background) {
  const int N = static_cast<int>(profile.size());
  QuasiProb q;
  q.theta = site_angles(N);
  q.p.resize(N);
  const double denom = 1.0 - 2.0 * m_background;
  if (denom == 0.0) throw std::invalid_argument("quasiprob: singular background");
  for (int n = 0; n < N; ++n) q.p[n] = 2.0 * (profile[n] - m_background) / denom;
  return q;
}

CircularMoment circular_mean(const QuasiProb& q) {
  std::complex<double> R{0.0, 0.0};
  for (std::size_t n = 0; n < q.p.size(); ++n)
    R += q.p[n] * std::polar(1.0, q.theta[n]);
  CircularMoment m;
  m.R = R;
  const double a = std::abs(R);
  if (a < kDegenerateR) {
    m.degenerate = true;
    m.mu = 0.0;
    m.sigma = std::numeric_limits<double>::infinity();
  } else {
    m.degenerate = false;
    m.mu = std::arg(R);
    m.sigma = (a >= 1.0) ? 0.0 : std::sqrt(-2.0 * std::log(a));
  }
  return m;
}

double drift_mu_tilde(const QuasiProb& q) {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t n = 0; n < q.p.size(); ++n)
    s += q.p[n] * std::polar(1.0, std::abs(q.theta[n]));
  if (std::abs(s) < kDegenerateR) return 0.0;
  return std::arg(s);
}

int wrapped_normal_k_max(double sigma) {
  if (!(sigma > 0.0)) return 1;
  // Image k contributes at most exp(-((2k-1)pi)^2 / (2 sigma^2)) anywhere
  // on (-pi, pi]; require that below 1e-14.
  const double half_width = sigma * std::sqrt(2.0 * 14.0 * std::numbers::ln10);
  return std::max(1, static_cast<int>(std::ceil((half_width + kPi) / (2.0 * kPi))) + 1);
}

double wrapped_normal_pdf(double theta, double mu, double sigma, int k_max) {
  if (!(sigma > 0.0)) throw std::invalid_argument("wrapped_normal_pdf: sigma <= 0");
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  double s = 0.0;
  for (int k = -k_max; k <= k_max; ++k) {
    const double x = theta - mu + 2.0 * kPi * k;
    s += std::exp(-x * x * inv2s2);
  }
  return s / (sigma * std::sqrt(2.0 * kPi));
}

double wrapped_normal_pdf(double theta, double mu, double sigma) {
  return wrapped_normal_pdf(theta, mu, sigma, wrapped_normal_k_max(sigma));
}

std::vector<double> discrete_wrapped_normal(int N, double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("discrete_wrapped_normal: sigma <= 0");
  const auto th = site_angles(N);
  const int k_max = wrapped_normal_k_max(sigma);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> q(N, 0.0);
  double total = 0.0;
  for (int n = 0; n < N; ++n) {
    double s = 0.0;
    for (int k = -k_max; k <= k_max; ++k) {
      const double x = th[n] + 2.0 * kPi * k;
      s += std::exp(-x * x * inv2s2);
    }
    q[n] = s;
    total += s;
  }
  for (auto& v : q) v /= total;
  return q;
}

}  // namespace floq
