// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#include "floq/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace floq {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

double wrap_phase(double phi) {
  phi = std::remainder(phi, 2.0 * kPi);
  if (phi <= -kPi) phi += 2.0 * kPi;
  return phi;
}

}  // namespace

DefaultFilter default_filter_order(std::int64_t d) {
  if (d < 10)
    throw std::invalid_argument("default_filter_order: requires d >= 10");
  DefaultFilter out;
  out.n_eigs = static_cast<int>(std::min<std::int64_t>(d / 10, 750));
  // K = ceil(0.4 d / n_eigs) = ceil(2d / (5 n_eigs)), exactly in integers.
  const std::int64_t num = 2 * d;
  const std::int64_t den = 5 * static_cast<std::int64_t>(out.n_eigs);
  out.filter_order = static_cast<int>((num + den - 1) / den);
  return out;
}

void apply_polfed(const CircuitKernel& kernel, SectorState& v, int order,
                  double phi_target) {
  if (order < 0) throw std::invalid_argument("apply_polfed: negative order");
  const std::int64_t d = kernel.basis()->dim();
  if (static_cast<std::int64_t>(v.amp.size()) != d)
    throw std::invalid_argument("apply_polfed: state/kernel size mismatch");
  if (order == 0) return;  // identity
  SectorState work = v;    // running U^k v
  cplx phase = 1.0;
  const cplx step = std::polar(1.0, -phi_target);
  for (int k = 1; k <= order; ++k) {
    kernel.apply(work);
    phase *= step;
    for (std::int64_t i = 0; i < d; ++i)
      v.amp[static_cast<std::size_t>(i)] +=
          phase * work.amp[static_cast<std::size_t>(i)];
  }
}

std::complex<double> polfed_gain(int order, double phi_target, double phi) {
  // Dirichlet form e^{-iKx/2} sin((K+1)x/2) / sin(x/2) of the geometric
  // sum: stays accurate near resonance, where (1 - q^{K+1}) / (1 - q)
  // cancels catastrophically.  Reducing x mod 2 pi first is exact (the
  // sign flips of the two sine factors and the prefactor cancel).
  const double x = std::remainder(phi_target + phi, 2.0 * kPi);
  if (x == 0.0) return cplx(order + 1.0, 0.0);
  const double half = 0.5 * x;
  const double ratio = std::sin((order + 1.0) * half) / std::sin(half);
  return ratio * std::polar(1.0, -order * half);  // ratio may be negative
}

namespace {

// Vector-interface adapters around the kernel.
struct Ops {
  const CircuitKernel& kernel;
  SectorState work;
  int order;
  int power;
  double phi_target;

  Ops(const CircuitKernel& k, int ord, int pow_, double phi_t)
      : kernel(k),
        work{k.basis(), std::vector<cplx>(
                            static_cast<std::size_t>(k.basis()->dim()))},
        order(ord),
        power(pow_),
        phi_target(phi_t) {}

  void u(const VectorXcd& in, VectorXcd& out) {
    std::copy(in.data(), in.data() + in.size(), work.amp.data());
    kernel.apply(work);
    out.resize(in.size());
    std::copy(work.amp.data(), work.amp.data() + in.size(), out.data());
  }

  // out = (filter)^power in; returns filter applications spent.
  int filter(const VectorXcd& in, VectorXcd& out) {
    SectorState acc{kernel.basis(),
                    std::vector<cplx>(static_cast<std::size_t>(in.size()))};
    std::copy(in.data(), in.data() + in.size(), acc.amp.data());
    for (int p = 0; p < power; ++p) apply_polfed(kernel, acc, order, phi_target);
    out.resize(in.size());
    std::copy(acc.amp.data(), acc.amp.data() + in.size(), out.data());
    return power;
  }
};

}  // namespace

SpectralResult arnoldi_eigenpairs(const CircuitKernel& kernel,
                                  const PolfedConfig& config, Rng& rng) {
  const auto basis = kernel.basis();
  const std::int64_t d = basis->dim();
  if (d < 1) throw std::invalid_argument("arnoldi_eigenpairs: empty sector");

  PolfedConfig cfg = config;
  if (cfg.n_eigs <= 0 || cfg.filter_order <= 0) {
    if (d >= 10) {
      const DefaultFilter def = default_filter_order(d);
      if (cfg.n_eigs <= 0) cfg.n_eigs = def.n_eigs;
      if (cfg.filter_order <= 0) cfg.filter_order = def.filter_order;
    } else {
      if (cfg.n_eigs <= 0) cfg.n_eigs = static_cast<int>(d);
      if (cfg.filter_order <= 0) cfg.filter_order = 1;
    }
  }
  if (cfg.filter_power < 1)
    throw std::invalid_argument("arnoldi_eigenpairs: filter_power < 1");
  const int nv = static_cast<int>(
      std::min<std::int64_t>(static_cast<std::int64_t>(cfg.n_eigs), d));
  // Lock a few pairs beyond the request so the returned nearest-nv
  // window is complete even when convergence order differs from
  // distance order at the window edge.
  const int pad =
      (nv >= d) ? 0
                : std::min(std::max(8, nv / 16), static_cast<int>(d) - nv);
  const int nvi = nv + pad;
  const std::int64_t cap =
      cfg.max_matvecs > 0 ? cfg.max_matvecs : 300LL * nv;

  Ops ops(kernel, cfg.filter_order, cfg.filter_power, cfg.phi_target);
  SpectralResult result;

  MatrixXcd locked_mat(d, nvi);
  std::vector<double> locked_phase;
  std::vector<double> locked_res;
  std::vector<cplx> locked_theta;  // exact filter gain of each locked pair
  int locked = 0;

  auto gain_of = [&](double phi) {
    const cplx g = polfed_gain(cfg.filter_order, cfg.phi_target, phi);
    cplx t = g;
    for (int p = 1; p < cfg.filter_power; ++p) t *= g;
    return t;
  };

  auto deflate = [&](VectorXcd& w) {
    if (locked == 0) return;
    const auto L = locked_mat.leftCols(locked);
    w.noalias() -= L * (L.adjoint() * w);
    w.noalias() -= L * (L.adjoint() * w);
  };

  auto random_start = [&]() {
    VectorXcd v(d);
    for (std::int64_t i = 0; i < d; ++i) v(i) = rng.gaussian_complex();
    deflate(v);
    const double n = v.norm();
    if (n < 1e-12) throw std::runtime_error("arnoldi: degenerate start vector");
    v /= n;
    return v;
  };

  VectorXcd v0 = random_start();
  VectorXcd w, tmp;
  int stall = 0;
  int extra_passes = 0;  // passes spent hunting the insurance pad only
  double best_seen = std::numeric_limits<double>::infinity();

  // Thick-restart state: the leading unconverged Ritz directions carried
  // over from the previous pass as an (approximately) invariant
  // factorization  F Vk = Vk Tk + vres * bk.  Locked pairs are kept
  // inside the working basis as a decoupled leading block ("soft
  // locking"), so orthogonalization deflates them exactly and their
  // Ritz copies are recognizable by eigenvector support.  Without the
  // carried-over subspace, interior pairs in large sectors never reach
  // the locking tolerance.
  bool have_thick = false;
  MatrixXcd Vk, Tk;
  Eigen::RowVectorXcd bk;
  VectorXcd vres;

  while (locked < nvi && result.matvecs < cap) {
    const int remaining = nvi - locked;
    const int kth = have_thick ? static_cast<int>(Vk.cols()) : 0;
    int m = locked + (cfg.subspace > 0
                          ? cfg.subspace
                          : remaining + std::max(48, remaining / 3));
    m = std::max(m, locked + kth + 32);
    m = static_cast<int>(
        std::min<std::int64_t>(static_cast<std::int64_t>(m), d));
    if (static_cast<std::int64_t>(m) >= d - 2)
      m = static_cast<int>(d);  // full complement: exact in one pass
    if (m <= locked) break;

    MatrixXcd V(d, m + 1);
    MatrixXcd H = MatrixXcd::Zero(m + 1, m);
    if (locked > 0) {
      V.leftCols(locked) = locked_mat.leftCols(locked);
      for (int i = 0; i < locked; ++i)
        H(i, i) = locked_theta[static_cast<std::size_t>(i)];
    }
    int j0 = locked;
    if (have_thick && kth > 0 && locked + kth + 16 <= m) {
      V.middleCols(locked, kth) = Vk;
      H.block(locked, locked, kth, kth) = Tk;
      H.block(locked + kth, locked, 1, kth) = bk;
      V.col(locked + kth) = vres;
      j0 = locked + kth;
    } else {
      deflate(v0);
      const double n0 = v0.norm();
      v0 = (n0 > 1e-12) ? VectorXcd(v0 / n0) : random_start();
      V.col(locked) = v0;
    }
    have_thick = false;

    int m_eff = m;
    bool breakdown = false;
    for (int j = j0; j < m; ++j) {
      if (result.matvecs + cfg.filter_power > cap) {
        m_eff = j;
        break;
      }
      result.matvecs += ops.filter(V.col(j), w);
      // CGS2 against the full basis (locked block included) keeps new
      // directions orthogonal to everything already converged.
      const auto Vj = V.leftCols(j + 1);
      VectorXcd h1 = Vj.adjoint() * w;
      w.noalias() -= Vj * h1;
      VectorXcd h2 = Vj.adjoint() * w;
      w.noalias() -= Vj * h2;
      H.col(j).head(j + 1) = h1 + h2;
      const double beta = w.norm();
      const double gain_scale =
          std::pow(cfg.filter_order + 1.0, cfg.filter_power);
      if (beta < 1e-10 * gain_scale) {
        m_eff = j + 1;
        breakdown = true;
        break;
      }
      H(j + 1, j) = beta;
      V.col(j + 1) = w / beta;
    }
    if (m_eff <= j0) break;  // no new directions: budget exhausted

    // Restart bookkeeping works on the Schur form: Schur vectors are
    // orthonormal and every leading block of the (reordered) triangular
    // factor spans an exactly H-invariant subspace, so the carried-over
    // factorization stays valid even when eigenvectors are
    // ill-conditioned (near-degenerate pairs would otherwise corrupt
    // the restart and blow up subsequent beta's).
    Eigen::ComplexSchur<MatrixXcd> schur(H.topLeftCorner(m_eff, m_eff));
    if (schur.info() != Eigen::Success)
      throw std::runtime_error("arnoldi: projected Schur factorization failed");
    MatrixXcd T = schur.matrixT();
    MatrixXcd Q = schur.matrixU();

    // Ritz copies of locked pairs live (up to tiny coupling) in the
    // locked coordinate block; flag them by Schur-vector support.
    std::vector<char> ghost(static_cast<std::size_t>(m_eff), 0);
    if (locked > 0) {
      for (int i = 0; i < m_eff; ++i)
        if (Q.col(i).head(locked).squaredNorm() > 0.5)
          ghost[static_cast<std::size_t>(i)] = 1;
    }

    // Swap adjacent diagonal entries of T (unitary similarity), used to
    // order wanted Ritz values into the leading block.  Near-equal
    // entries are left in place: for restart purposes either twin is as
    // good, and the rotation would be ill-conditioned.
    auto try_swap = [&](int k) -> bool {
      const cplx a = T(k, k);
      const cplx b = T(k, k + 1);
      const cplx cc = T(k + 1, k + 1);
      if (std::abs(a - cc) < 1e-12 * (std::abs(a) + std::abs(cc) + 1e-300))
        return false;
      const cplx x = b / (cc - a);  // [x, 1] is the cc-eigenvector
      const double nrm = std::sqrt(std::norm(x) + 1.0);
      Eigen::Matrix2cd G;
      G << std::conj(x) / nrm, 1.0 / nrm, -1.0 / nrm, x / nrm;
      T.middleRows(k, 2) = G * T.middleRows(k, 2);
      T.middleCols(k, 2) = T.middleCols(k, 2) * G.adjoint();
      Q.middleCols(k, 2) = Q.middleCols(k, 2) * G.adjoint();
      T(k + 1, k) = cplx(0.0, 0.0);
      std::swap(ghost[static_cast<std::size_t>(k)],
                ghost[static_cast<std::size_t>(k + 1)]);
      return true;
    };

    std::vector<int> ng;  // non-ghost positions, |theta| descending
    ng.reserve(static_cast<std::size_t>(m_eff));
    for (int i = 0; i < m_eff; ++i)
      if (!ghost[static_cast<std::size_t>(i)]) ng.push_back(i);
    std::sort(ng.begin(), ng.end(), [&](int a, int b) {
      return std::abs(T(a, a)) > std::abs(T(b, b));
    });
    if (ng.empty()) {
      stall += 1;
      if (stall >= 12) break;
      v0 = random_start();
      continue;
    }

    const double theta_scale = std::max(1.0, std::abs(T(ng[0], ng[0])));
    // Pairs whose filter gains differ by less than this are handled as
    // one cluster and separated against U directly (near-degenerate
    // eigenphases have near-equal gains, so the filter alone cannot
    // split them, but U's projection onto the cluster span can).  True
    // neighbors in the window are ~|theta'| * 2 pi / d apart in gain,
    // far above this threshold, so unrelated pairs do not merge.
    const double cluster_tol = 1e-5 * theta_scale;

    // beta coupling the square factorization to the next basis vector;
    // zero on breakdown (invariant subspace, H entry never written).
    const double beta_last = std::abs(H(m_eff, m_eff - 1));

    // Ritz eigenvector in Schur coordinates for the value at position
    // p: upper-triangular back-substitution on (T - lambda).  Tiny
    // denominators (degenerate twins) are floored; the resulting mixed
    // vector is still a fine candidate, and cluster rotation against U
    // sorts its members out.
    const double denom_floor = 1e-13 * theta_scale;
    auto ritz_z = [&](int p) {
      VectorXcd z = VectorXcd::Zero(p + 1);
      z(p) = cplx(1.0, 0.0);
      const cplx lam = T(p, p);
      for (int row = p - 1; row >= 0; --row) {
        cplx s(0.0, 0.0);
        for (int col = row + 1; col <= p; ++col) s += T(row, col) * z(col);
        cplx denom = lam - T(row, row);
        if (std::abs(denom) < denom_floor) denom = cplx(denom_floor, 0.0);
        z(row) = s / denom;
      }
      z /= z.norm();
      return z;
    };

    // Cheap per-pair convergence estimate from the factorization:
    // ||F y - theta y|| = beta_last * |last component of y|.  Candidate
    // formation and the true residual test against U are expensive, so
    // only pairs whose estimate is within reach of the locking
    // tolerance are tested; early passes typically skip all of them.
    const double gate = std::max(100.0 * cfg.tol, 1e-6) * theta_scale;
    double best_est = std::numeric_limits<double>::infinity();
    std::vector<int> cand;          // positions to form, |theta| desc
    std::vector<VectorXcd> cand_z;  // their Schur-coordinate vectors
    const int budget =
        breakdown ? static_cast<int>(ng.size())
                  : std::min(static_cast<int>(ng.size()), 2 * remaining + 32);
    for (int c = 0; c < budget; ++c) {
      const int p = ng[static_cast<std::size_t>(c)];
      VectorXcd z = ritz_z(p);
      const double est =
          beta_last * std::abs((Q.row(m_eff - 1).head(p + 1) * z).value());
      best_est = std::min(best_est, est);
      if (est <= gate) {
        cand.push_back(p);
        cand_z.push_back(std::move(z));
      }
    }
    // Pull in every position (ghost or not) that is eigenvalue-
    // degenerate with a selected candidate, so clusters are rotated
    // complete: a true pair degenerate with a locked one is only
    // recoverable from the full cluster (the ghost column collapses
    // under deflation, the partner survives), and near-degenerate
    // unconverged partners can only be separated jointly against U.
    if (!cand.empty()) {
      const std::size_t n_primary = cand.size();
      std::vector<char> in_cand(static_cast<std::size_t>(m_eff), 0);
      for (const int i : cand) in_cand[static_cast<std::size_t>(i)] = 1;
      int extras = 0;
      for (int i = 0; i < m_eff && extras < 64; ++i) {
        if (in_cand[static_cast<std::size_t>(i)]) continue;
        for (std::size_t c = 0; c < n_primary; ++c) {
          if (std::abs(T(i, i) - T(cand[c], cand[c])) <= cluster_tol) {
            cand.push_back(i);
            cand_z.push_back(ritz_z(i));
            ++extras;
            break;
          }
        }
      }
      std::vector<std::size_t> perm(cand.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(T(cand[a], cand[a])) > std::abs(T(cand[b], cand[b]));
      });
      std::vector<int> cand2;
      std::vector<VectorXcd> cand_z2;
      cand2.reserve(cand.size());
      cand_z2.reserve(cand.size());
      for (const std::size_t a : perm) {
        cand2.push_back(cand[a]);
        cand_z2.push_back(std::move(cand_z[a]));
      }
      cand.swap(cand2);
      cand_z.swap(cand_z2);
    }
    const int n_cand = static_cast<int>(cand.size());

    // Lift candidates to state space in one product, then deflate.
    MatrixXcd X(d, n_cand);
    if (n_cand > 0) {
      MatrixXcd Ysel(m_eff, n_cand);
      for (int c = 0; c < n_cand; ++c) {
        const int p = cand[static_cast<std::size_t>(c)];
        Ysel.col(c).noalias() =
            Q.leftCols(p + 1) * cand_z[static_cast<std::size_t>(c)];
      }
      X.noalias() = V.leftCols(m_eff) * Ysel;
      if (locked > 0) {
        const auto L = locked_mat.leftCols(locked);
        X.noalias() -= L * (L.adjoint() * X);
      }
    }

    int new_locks = 0;
    bool have_restart = false;
    VectorXcd restart;

    int c = 0;
    while (c < n_cand && locked < nvi) {
      int cend = c + 1;
      while (cend < n_cand &&
             std::abs(T(cand[static_cast<std::size_t>(cend)],
                        cand[static_cast<std::size_t>(cend)]) -
                      T(cand[static_cast<std::size_t>(c)],
                        cand[static_cast<std::size_t>(c)])) <= cluster_tol)
        ++cend;

      // Normalize the cluster columns, dropping those that collapsed onto
      // the locked subspace.
      std::vector<int> cols;
      for (int a = c; a < cend; ++a) {
        const double n = X.col(a).norm();
        if (n > 1e-8) {
          X.col(a) /= n;
          cols.push_back(a);
        }
      }
      if (cols.empty()) {
        c = cend;
        continue;
      }

      MatrixXcd Xc(d, static_cast<int>(cols.size()));
      for (std::size_t a = 0; a < cols.size(); ++a)
        Xc.col(static_cast<int>(a)) = X.col(cols[a]);

      if (cols.size() > 1) {
        // The filter cannot separate equal filter-eigenvalues; rotate the
        // cluster so each column diagonalizes U's projection onto it.
        // The rotation's eigenvector matrix need not be unitary, so the
        // rotated columns are individually re-verified below.
        MatrixXcd Z(d, static_cast<int>(cols.size()));
        for (int a = 0; a < Xc.cols(); ++a) {
          ops.u(Xc.col(a), tmp);
          Z.col(a) = tmp;
        }
        const MatrixXcd A = Xc.adjoint() * Z;
        Eigen::ComplexEigenSolver<MatrixXcd> small(A);
        if (small.info() == Eigen::Success) Xc = Xc * small.eigenvectors();
      }

      for (int a = 0; a < Xc.cols() && locked < nvi; ++a) {
        // Re-orthogonalize against everything locked so far -- including
        // pairs locked moments ago in this very pass and the other
        // members of this cluster -- so the locked block stays exactly
        // orthonormal (deflation must remain a projector); then verify
        // the residual of the re-orthogonalized vector from scratch.
        VectorXcd x = Xc.col(a);
        if (locked > 0) {
          const auto L = locked_mat.leftCols(locked);
          x.noalias() -= L * (L.adjoint() * x);
          x.noalias() -= L * (L.adjoint() * x);
        }
        const double nx = x.norm();
        if (nx < 1e-8) continue;  // collapsed onto the locked span
        x /= nx;
        ops.u(x, tmp);
        const cplx ray = x.dot(tmp);  // <x|U|x>
        const double phi = wrap_phase(-std::arg(ray));
        const double res = (tmp - std::polar(1.0, -phi) * x).norm();
        if (res < cfg.tol) {
          locked_mat.col(locked) = x;
          locked_phase.push_back(phi);
          locked_res.push_back(res);
          locked_theta.push_back(gain_of(phi));
          ++locked;
          ++new_locks;
          // A locked vector mixes the whole cluster (the rotation is a
          // general linear map), so every member position is consumed:
          // keeping a partner's Schur column would re-insert a direction
          // overlapping the freshly locked one and corrupt the restart.
          for (int a2 = c; a2 < cend; ++a2)
            ghost[static_cast<std::size_t>(
                cand[static_cast<std::size_t>(a2)])] = 1;
        } else {
          best_est = std::min(best_est, res);
          if (!have_restart) {
            restart = x;
            have_restart = true;
          }
        }
      }
      c = cend;
    }

    if (std::getenv("FLOQ_ARNOLDI_DEBUG") != nullptr) {
      std::fprintf(stderr,
                   "[arnoldi] m=%d m_eff=%d j0=%d locked=%d new=%d cand=%d "
                   "best_est=%.3e beta=%.3e matvecs=%lld stall=%d\n",
                   m, m_eff, j0, locked, new_locks, n_cand, best_est,
                   beta_last, static_cast<long long>(result.matvecs), stall);
    }

    if (locked >= nvi) break;
    // The requested pairs are in hand; spend at most a couple of extra
    // passes on the insurance pad (its members converge slowest).
    if (locked >= nv && ++extra_passes > 2) break;

    // Stall only counts passes that neither lock a pair nor push the
    // best unconverged estimate meaningfully downward.
    const bool progressed = new_locks > 0 || best_est < 0.7 * best_seen;
    best_seen = std::min(best_seen, best_est);
    stall = progressed ? 0 : stall + 1;
    if (stall >= 12) break;

    // Keep the leading unconverged Ritz directions for the next pass:
    // reorder the Schur form so the top non-ghost gains occupy the
    // leading block (selection sort with adjacent swaps; a failed swap
    // leaves a near-equal twin in place, which is as good a keep).  The
    // leading block of a triangular factor spans an exactly invariant
    // subspace of the projected operator, so the carried factorization
    //     Tk = T(0:k, 0:k),  bk = beta_last * (last row of Q)(0:k)
    // is exact no matter how ill-conditioned the eigenvectors are.
    const int keep_target =
        std::min(std::max(remaining - new_locks, 0) + 16, m_eff);
    int keep = 0;
    for (int slot = 0; slot < keep_target; ++slot) {
      int best = -1;
      double bv = -1.0;
      for (int j = slot; j < m_eff; ++j) {
        if (ghost[static_cast<std::size_t>(j)]) continue;
        const double v = std::abs(T(j, j));
        if (v > bv) {
          bv = v;
          best = j;
        }
      }
      if (best < 0) break;
      for (int j = best; j > slot; --j)
        if (!try_swap(j - 1)) break;
      ghost[static_cast<std::size_t>(slot)] = 1;  // slot is spoken for
      ++keep;
    }
    if (keep > 0 && m_eff > j0) {
      Vk.noalias() = V.leftCols(m_eff) * Q.leftCols(keep);
      Tk = T.topLeftCorner(keep, keep);
      bk = beta_last * Q.row(m_eff - 1).head(keep);
      if (beta_last > 0.0) {
        vres = V.col(m_eff);
      } else {
        // Invariant kept subspace: extend with a fresh direction.
        vres = random_start();
        vres.noalias() -= Vk * (Vk.adjoint() * vres);
        vres.noalias() -= Vk * (Vk.adjoint() * vres);
        const double n = vres.norm();
        if (n < 1e-12) break;
        vres /= n;
        bk.setZero();
      }
      have_thick = true;
      continue;
    }

    if (have_restart) {
      deflate(restart);
      const double n = restart.norm();
      if (n > 1e-6) {
        v0 = restart / n;
        continue;
      }
    }
    v0 = random_start();
  }

  result.converged = (locked >= nv);

  // Among everything locked, return the nv pairs nearest phi_target
  // (pad extras are insurance only), sorted by eigenphase ascending.
  std::vector<int> order(static_cast<std::size_t>(locked));
  std::iota(order.begin(), order.end(), 0);
  auto dist = [&](int i) {
    return std::abs(std::remainder(
        locked_phase[static_cast<std::size_t>(i)] - cfg.phi_target,
        2.0 * kPi));
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = dist(a);
    const double db = dist(b);
    if (da != db) return da < db;
    return locked_phase[static_cast<std::size_t>(a)] <
           locked_phase[static_cast<std::size_t>(b)];
  });
  if (static_cast<int>(order.size()) > nv) order.resize(static_cast<std::size_t>(nv));
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return locked_phase[static_cast<std::size_t>(a)] <
           locked_phase[static_cast<std::size_t>(b)];
  });
  result.eigenphases.reserve(order.size());
  result.residuals.reserve(order.size());
  for (const int i : order) {
    result.eigenphases.push_back(locked_phase[static_cast<std::size_t>(i)]);
    result.residuals.push_back(locked_res[static_cast<std::size_t>(i)]);
  }
  if (config.keep_vectors) {
    result.vectors.reserve(order.size());
    for (const int i : order) {
      SectorState s{basis, std::vector<cplx>(static_cast<std::size_t>(d))};
      Eigen::Map<VectorXcd>(s.amp.data(), d) = locked_mat.col(i);
      result.vectors.push_back(std::move(s));
    }
  }
  return result;
}

std::vector<double> gap_ratios(const std::vector<double>& phases) {
  const std::size_t n = phases.size();
  if (n < 3) throw std::invalid_argument("gap_ratios: need at least 3 phases");
  for (std::size_t i = 1; i < n; ++i)
    if (phases[i] < phases[i - 1])
      throw std::invalid_argument("gap_ratios: phases must be sorted");
  std::vector<double> rs;
  rs.reserve(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d0 = phases[i] - phases[i - 1];
    const double d1 = phases[i + 1] - phases[i];
    const double mx = std::max(d0, d1);
    rs.push_back(mx > 0.0 ? std::min(d0, d1) / mx : 0.0);
  }
  return rs;
}

double entanglement_entropy(const SectorState& psi, int N_A) {
  const SectorBasis& basis = *psi.basis;
  const int N = basis.N();
  if (N_A < 1 || N_A >= N)
    throw std::invalid_argument("entanglement_entropy: cut out of range");
  const int N_B = N - N_A;
  const int n_up = basis.n_up();
  const std::uint32_t maskA = (1u << N_A) - 1u;

  const int a_lo = std::max(0, n_up - N_B);
  const int a_hi = std::min(N_A, n_up);
  std::vector<MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(a_hi - a_lo + 1));
  for (int a = a_lo; a <= a_hi; ++a)
    blocks.emplace_back(MatrixXcd::Zero(
        static_cast<Eigen::Index>(binomial(N_A, a)),
        static_cast<Eigen::Index>(binomial(N_B, n_up - a))));

  const std::int64_t d = basis.dim();
  for (std::int64_t i = 0; i < d; ++i) {
    const cplx amp = psi.amp[static_cast<std::size_t>(i)];
    if (amp == cplx(0.0, 0.0)) continue;
    const std::uint32_t x = basis.state(i);
    const std::uint32_t xa = x & maskA;
    const std::uint32_t xb = x >> N_A;
    const int a = std::popcount(xa);
    blocks[static_cast<std::size_t>(a - a_lo)](
        static_cast<Eigen::Index>(combinadic_rank(xa)),
        static_cast<Eigen::Index>(combinadic_rank(xb))) = amp;
  }

  double entropy = 0.0;
  for (const auto& block : blocks) {
    if (block.size() == 0) continue;
    Eigen::JacobiSVD<MatrixXcd> svd(block);
    const auto& s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double s2 = s(k) * s(k);
      if (s2 > 1e-30) entropy -= s2 * std::log(s2);
    }
  }
  return entropy;
}

double page_entropy(double d_A, double d) {
  if (!(d_A >= 1.0) || !(d >= d_A))
    throw std::invalid_argument("page_entropy: need 1 <= d_A <= d");
  return std::log(d_A) - d_A * d_A / (2.0 * d);
}

SpectralResult spectral_diagnostics(const CircuitKernel& kernel,
                                    const PolfedConfig& config, Rng& rng,
                                    int N_A) {
  PolfedConfig cfg = config;
  cfg.keep_vectors = true;
  SpectralResult result = arnoldi_eigenpairs(kernel, cfg, rng);
  if (result.eigenphases.size() >= 3)
    result.gap_ratios = gap_ratios(result.eigenphases);
  result.entropies.reserve(result.vectors.size());
  for (const auto& v : result.vectors)
    result.entropies.push_back(entanglement_entropy(v, N_A));
  if (!config.keep_vectors) {
    result.vectors.clear();
    result.vectors.shrink_to_fit();
  }
  return result;
}

}  // namespace floq
