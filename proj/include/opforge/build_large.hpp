// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <map>
#include <vector>

#include "opforge/build_band.hpp"
#include "opforge/lemmas.hpp"
#include "opforge/partition.hpp"
#include "opforge/plank.hpp"
#include "opforge/records.hpp"
#include "opforge/rng.hpp"

namespace opforge::forge {

struct LargeParams {
  double C = 0.0;
  double D = 0.0;
  double eps_p = 0.0;  // <= 0: derive
  int N = 0;
  std::uint64_t seed = 1;
  numrange::WindowPolicy window;
  double ineq_slack = 1e-8;
  double gram_tol = 1e-10;
};

/// Constants derived from the proof's constraints: d = D/2 and the smallest
/// a >= 1 with 4/a <= D and 54/sqrt(a) <= C^2, giving c1 = C/(3 sqrt a),
/// c2 = 1/sqrt(a).
struct LargeConstants {
  double a, c1, c2, d;
};

inline LargeConstants derive_large_constants(double C, double D) {
  double a = std::max({1.0, 4.0 / D, sqr(54.0 / (C * C))});
  return {a, C / (3.0 * std::sqrt(a)), 1.0 / std::sqrt(a), D / 2.0};
}

/// Orthonormal u_1..u_N whose matrix has uniformly large diagonal
/// (|<T u_n, u_n>| >= d) and two-sided polynomial off-diagonal bounds
/// c1 min^{1/2}/max^{3/2} <= |<T u_n, u_j>| <= c2 / max^{1/2}. Each u_n
/// mixes a fresh diameter-pair state v_n with a plank vector z_n that keeps
/// a uniform grip on every residual (I-P)Tu_j, (I-P)T*u_j and on the dyadic
/// seed's residual.
inline BuildState build_large_entries(const seqspace::OperatorModel& T, const LargeParams& p) {
  if (p.N < 1) fail(Error::Kind::config, "large: N must be >= 1");
  if (T.norm_bound > 1.0 + 1e-12)
    fail(Error::Kind::precondition, "large: norm_bound must be normalized to 1");
  const double diam = T.we_region.diameter();
  if (diam <= 0) fail(Error::Kind::precondition, "large: W_e has zero diameter");
  if (!(p.C > 0 && p.C < diam / (4 * std::sqrt(2.0)) - 1e-6) ||
      !(p.D > 0 && p.D < diam / 4 - 1e-6))
    fail(Error::Kind::precondition, "large: constants C, D infeasible for this region");

  const LargeConstants kc = derive_large_constants(p.C, p.D);
  Rng rng = Rng(p.seed).fork("plank");

  BuildState state;
  state.construction = "large";
  state.constants["C"] = p.C;
  state.constants["D"] = p.D;
  state.constants["a"] = kc.a;
  state.constants["c1"] = kc.c1;
  state.constants["c2"] = kc.c2;
  state.constants["d"] = kc.d;

  std::deque<FinVec> tu, tsu;
  // Entry ledgers, 0-based: A[i][j] = <T u_{j+1}, u_{i+1}>, B likewise for T*.
  std::vector<std::vector<cx>> A, B;
  // Raw pair ledgers for fresh residual-Gram rows.
  std::vector<std::vector<cx>> P_TT, P_TS, P_SS;
  // Residual Grams w.r.t. the current projection P_{n-1}.
  std::vector<std::vector<cx>> R_TT, R_TS, R_SS;
  // Seed ledgers per dyadic label.
  std::map<int, std::vector<cx>> s_u, s_T, s_S;  // <y, u_i>, <y, Tu_j>, <y, T*u_j>
  std::map<int, double> seed_resid_sq, seed_bound;

  auto ensure_label = [&](int label) {
    if (seed_resid_sq.count(label)) return;
    state.ensure_seed(label, label + 1);  // y_m = e_{m+1}
    seed_resid_sq[label] = 1.0;
    seed_bound[label] = 1.0;
    std::size_t n = state.us.size();
    auto& u_row = s_u[label];
    auto& t_row = s_T[label];
    auto& s_row = s_S[label];
    const FinVec& y = *state.seed_by_label(label);
    for (std::size_t i = 0; i < n; ++i) {
      u_row.push_back(inner_product(y, state.us[i]));
      t_row.push_back(inner_product(y, tu[i]));
      s_row.push_back(inner_product(y, tsu[i]));
    }
    // replay the residual against the already built prefix
    double acc = 1.0;
    for (std::size_t i = 0; i < n; ++i) acc -= std::norm(u_row[i]);
    seed_resid_sq[label] = acc;
  };

  for (int n = 1; n <= p.N; ++n) {
    const int label = dyadic_level(n);
    ensure_label(label);
    StepRecord rec;
    rec.n = n;
    rec.kind = "large";
    rec.seed_m = label;

    detail::ConstraintSet cons;
    for (std::size_t j = 0; j < state.us.size(); ++j) {
      cons.add(state.us[j]);
      cons.add(tu[j]);
      cons.add(tsu[j]);
    }
    for (std::size_t i = 0; i < state.seeds.size(); ++i)
      cons.add_with_images(T, state.seeds[i]);

    FinVec v = pearcy_state(T, cons.ptrs, {p.C, p.D, p.eps_p}, p.window);

    // Plank step over the 2(n-1)+1 residual targets. Weight admissibility
    // (1/sqrt2)^2 + 2(n-1)/(4n) < 1 holds for every n.
    const std::size_t K = 2 * static_cast<std::size_t>(n - 1) + 1;
    const double w_off = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
    FinVec z;
    std::vector<double> lhs(K, 0.0), rhs(K, 0.0);
    if (n == 1) {
      z = *state.seed_by_label(label);
      lhs[0] = 1.0;
      rhs[0] = 1.0 / std::sqrt(2.0);
    } else {
      const std::size_t m = static_cast<std::size_t>(n - 1);
      // Gram of the raw residual targets [rTu_1..rTu_{n-1}, rT*u_1.., r_y]
      // in the Eigen convention G[j][k] = t_j^* t_k = conj(<t_j, t_k>).
      Eigen::MatrixXcd G(K, K);
      auto math_TT = [&](std::size_t j, std::size_t k) { return R_TT[j][k]; };
      auto math_TS = [&](std::size_t j, std::size_t k) { return R_TS[j][k]; };
      auto math_SS = [&](std::size_t j, std::size_t k) { return R_SS[j][k]; };
      const auto& su = s_u[label];
      const auto& sT = s_T[label];
      const auto& sS = s_S[label];
      auto math_Ty = [&](std::size_t j) {  // <rTu_j, r_y>
        KahanSumCx acc;
        acc.add(std::conj(sT[j]));
        for (std::size_t i = 0; i < m; ++i) acc.add(-A[i][j] * std::conj(su[i]));
        return acc.value();
      };
      auto math_Sy = [&](std::size_t j) {
        KahanSumCx acc;
        acc.add(std::conj(sS[j]));
        for (std::size_t i = 0; i < m; ++i) acc.add(-B[i][j] * std::conj(su[i]));
        return acc.value();
      };
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
          G(j, k) = std::conj(math_TT(j, k));
          G(j, m + k) = std::conj(math_TS(j, k));
          G(m + j, k) = math_TS(k, j);
          G(m + j, m + k) = std::conj(math_SS(j, k));
        }
      for (std::size_t j = 0; j < m; ++j) {
        G(j, K - 1) = std::conj(math_Ty(j));
        G(K - 1, j) = std::conj(G(j, K - 1));
        G(m + j, K - 1) = std::conj(math_Sy(j));
        G(K - 1, m + j) = std::conj(G(m + j, K - 1));
      }
      G(K - 1, K - 1) = seed_resid_sq[label];

      std::vector<double> norms(K), weights(K);
      for (std::size_t j = 0; j < K; ++j) {
        double nsq = std::max(G(j, j).real(), 0.0);
        norms[j] = std::sqrt(nsq);
        weights[j] = (norms[j] > 1e-9) ? (j + 1 == K ? 1.0 / std::sqrt(2.0) : w_off) : 0.0;
      }
      // normalized-target Gram; jitter keeps the factorization alive when
      // residuals are nearly dependent
      Eigen::MatrixXcd Gn(K, K);
      for (std::size_t j = 0; j < K; ++j)
        for (std::size_t k = 0; k < K; ++k)
          Gn(j, k) = (norms[j] > 1e-9 && norms[k] > 1e-9)
                         ? G(j, k) / (norms[j] * norms[k])
                         : (j == k ? cx{1, 0} : cx{0, 0});
      Eigen::MatrixXcd Gj = Gn + 1e-12 * Eigen::MatrixXcd::Identity(K, K);
      Eigen::LLT<Eigen::MatrixXcd> llt(Gj);
      if (llt.info() != Eigen::Success)
        fail(Error::Kind::construction, "large: residual Gram not factorizable");
      Eigen::MatrixXcd R = llt.matrixL().adjoint();  // coords: column j of R
      Eigen::VectorXcd x = numrange::detail::plank_solve_dense(R, weights, rng);
      Eigen::VectorXcd beta = R.triangularView<Eigen::Upper>().solve(x);

      // z = sum_j beta_j / norm_j * raw residual target_j, assembled from
      // the ledgers in one combination pass.
      std::vector<cx> cT(m, cx{0, 0}), cS(m, cx{0, 0});
      cx cy{0, 0};
      for (std::size_t j = 0; j < m; ++j) {
        if (norms[j] > 1e-9) cT[j] = beta(j) / norms[j];
        if (norms[m + j] > 1e-9) cS[j] = beta(m + j) / norms[m + j];
      }
      if (norms[K - 1] > 1e-9) cy = beta(K - 1) / norms[K - 1];
      for (std::size_t j = 0; j < m; ++j) {
        z.add_scaled(tu[j], cT[j]);
        z.add_scaled(tsu[j], cS[j]);
      }
      z.add_scaled(*state.seed_by_label(label), cy);
      for (std::size_t i = 0; i < m; ++i) {
        KahanSumCx coeff;
        for (std::size_t j = 0; j < m; ++j) {
          coeff.add(cT[j] * A[i][j]);
          coeff.add(cS[j] * B[i][j]);
        }
        coeff.add(cy * su[i]);
        z.add_scaled(state.us[i], -coeff.value());
      }
      z.normalize();

      // certificates (z1)-(z3), verified on the actual vectors
      for (std::size_t j = 0; j < m; ++j) {
        lhs[j] = std::abs(inner_product(tu[j], z));
        rhs[j] = w_off * norms[j];
        lhs[m + j] = std::abs(inner_product(tsu[j], z));
        rhs[m + j] = w_off * norms[m + j];
      }
      lhs[K - 1] = std::abs(inner_product(*state.seed_by_label(label), z));
      rhs[K - 1] = norms[K - 1] / std::sqrt(2.0);
      for (std::size_t j = 0; j < K; ++j)
        if (lhs[j] < rhs[j] - 1e-10)
          fail(Error::Kind::construction,
               "large step " + std::to_string(n) + ": plank certificate failed at target " +
                   std::to_string(j));
    }
    rec.plank_lhs = lhs;
    rec.plank_rhs = rhs;

    const double mix = 1.0 / std::sqrt(kc.a * n);
    FinVec u_n = z.scaled(cx{mix, 0});
    u_n.add_scaled(v, cx{std::sqrt(1.0 - 1.0 / (kc.a * n)), 0});
    u_n.normalize();

    FinVec Tu_n = T.apply(u_n);
    FinVec Tsu_n = T.apply_adjoint(u_n);

    // Eq. (11) and Eq. (12) audits for the new row/column.
    const cx diag = inner_product(Tu_n, u_n);
    if (std::abs(diag) < kc.d - p.ineq_slack)
      fail(Error::Kind::audit, "large step " + std::to_string(n) + ": diagonal below d");
    for (int j = 1; j < n; ++j) {
      const double lo = kc.c1 * std::sqrt(static_cast<double>(j)) /
                        (static_cast<double>(n) * std::sqrt(static_cast<double>(n)));
      const double hi = kc.c2 / std::sqrt(static_cast<double>(n));
      const double e1 = std::abs(inner_product(tu[static_cast<std::size_t>(j - 1)], u_n));
      const double e2 = std::abs(inner_product(Tu_n, state.us[static_cast<std::size_t>(j - 1)]));
      if (e1 < lo - p.ineq_slack || e1 > hi + p.ineq_slack || e2 < lo - p.ineq_slack ||
          e2 > hi + p.ineq_slack)
        fail(Error::Kind::audit, "large step " + std::to_string(n) +
                                     ": off-diagonal bound failed at j = " + std::to_string(j));
    }
    detail::audit_gram_row(state.us, u_n, n, p.gram_tol);

    // ledger updates
    const std::size_t m0 = static_cast<std::size_t>(n - 1);
    for (auto* M : {&A, &B, &P_TT, &P_TS, &P_SS, &R_TT, &R_TS, &R_SS}) {
      M->resize(static_cast<std::size_t>(n));
      for (auto& row : *M) row.resize(static_cast<std::size_t>(n), cx{0, 0});
    }
    for (std::size_t j = 0; j < m0; ++j) {
      A[m0][j] = inner_product(tu[j], u_n);
      B[m0][j] = inner_product(tsu[j], u_n);
      A[j][m0] = inner_product(Tu_n, state.us[j]);
      B[j][m0] = inner_product(Tsu_n, state.us[j]);
    }
    A[m0][m0] = diag;
    B[m0][m0] = inner_product(Tsu_n, u_n);
    for (std::size_t j = 0; j < m0; ++j) {
      P_TT[m0][j] = inner_product(Tu_n, tu[j]);
      P_TT[j][m0] = std::conj(P_TT[m0][j]);
      P_SS[m0][j] = inner_product(Tsu_n, tsu[j]);
      P_SS[j][m0] = std::conj(P_SS[m0][j]);
      P_TS[m0][j] = inner_product(Tu_n, tsu[j]);
      P_TS[j][m0] = inner_product(tu[j], Tsu_n);
    }
    P_TT[m0][m0] = cx{Tu_n.norm_sq(), 0};
    P_SS[m0][m0] = cx{Tsu_n.norm_sq(), 0};
    P_TS[m0][m0] = inner_product(Tu_n, Tsu_n);

    state.us.push_back(std::move(u_n));
    tu.push_back(std::move(Tu_n));
    tsu.push_back(std::move(Tsu_n));

    // residual Grams w.r.t. P_n: old entries decremented, fresh row direct
    for (std::size_t j = 0; j < m0; ++j)
      for (std::size_t k = 0; k < m0; ++k) {
        R_TT[j][k] -= A[m0][j] * std::conj(A[m0][k]);
        R_TS[j][k] -= A[m0][j] * std::conj(B[m0][k]);
        R_SS[j][k] -= B[m0][j] * std::conj(B[m0][k]);
      }
    for (std::size_t j = 0; j <= m0; ++j) {
      KahanSumCx tt, ts, st, ss;
      tt.add(P_TT[m0][j]);
      ts.add(P_TS[m0][j]);
      st.add(P_TS[j][m0]);
      ss.add(P_SS[m0][j]);
      for (std::size_t i = 0; i <= m0; ++i) {
        tt.add(-A[i][m0] * std::conj(A[i][j]));
        ts.add(-A[i][m0] * std::conj(B[i][j]));
        st.add(-A[i][j] * std::conj(B[i][m0]));
        ss.add(-B[i][m0] * std::conj(B[i][j]));
      }
      R_TT[m0][j] = tt.value();
      R_TT[j][m0] = std::conj(tt.value());
      R_TS[m0][j] = ts.value();
      R_TS[j][m0] = st.value();
      R_SS[m0][j] = ss.value();
      R_SS[j][m0] = std::conj(ss.value());
    }

    // invariants (3)/(4): residual norms of Tu_j, T*u_j vs C^2 j / (2n)
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
      const double bound = p.C * p.C * static_cast<double>(j + 1) / (2.0 * n);
      if (R_TT[j][j].real() < bound - p.ineq_slack || R_SS[j][j].real() < bound - p.ineq_slack)
        fail(Error::Kind::audit, "large step " + std::to_string(n) +
                                     ": invariant (3)/(4) failed at j = " + std::to_string(j + 1));
    }

    // invariant (5): seed decay vs prod (1 - 1/(2aj)) over the seed's steps
    for (auto& [lbl, rsq] : seed_resid_sq) {
      const FinVec& y = *state.seed_by_label(lbl);
      cx yu = inner_product(y, state.us[m0]);
      s_u[lbl].push_back(yu);
      s_T[lbl].push_back(inner_product(y, tu[m0]));
      s_S[lbl].push_back(inner_product(y, tsu[m0]));
      rsq -= std::norm(yu);
      if (lbl == label) seed_bound[lbl] *= 1.0 - 1.0 / (2.0 * kc.a * n);
      if (rsq > seed_bound[lbl] + 1e-9)
        fail(Error::Kind::audit,
             "large step " + std::to_string(n) + ": invariant (5) failed for seed " +
                 std::to_string(lbl));
    }

    state.steps.push_back(std::move(rec));
  }
  return state;
}

}  // namespace opforge::forge
