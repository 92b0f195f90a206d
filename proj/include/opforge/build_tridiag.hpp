// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <deque>
#include <map>
#include <vector>

#include "opforge/build_band.hpp"
#include "opforge/lemmas.hpp"
#include "opforge/numrange.hpp"
#include "opforge/records.hpp"

namespace opforge::forge {

struct TridiagParams {
  double epsilon = 0.0;
  int N = 0;
  numrange::WindowPolicy window;
  double entry_tol = 1e-9;
  double gram_tol = 1e-10;
};

/// Orthonormal u_1..u_N with prescribed main diagonal lambda_n and first
/// off-diagonals <T u_n, u_{n+1}> = mu_n, <T u_{n+1}, u_n> = nu_n. Each step
/// decomposes u_n = s_n v_n + z_n + b_n: b_n is a small multiple of the
/// admissible seed's residual direction, z_n reproduces the prescribed
/// pairings against w_{n-1}, w'_{n-1} through the perturbation-state solver,
/// and v_n is a fresh perturbation state at the corrected target lambda'_n.
inline BuildState build_tridiagonal(const seqspace::OperatorModel& T,
                                    const std::vector<cx>& lambdas, const std::vector<cx>& mus,
                                    const std::vector<cx>& nus, const TridiagParams& p) {
  const double eps = p.epsilon;
  if (p.N < 1) fail(Error::Kind::config, "tridiag: N must be >= 1");
  if (!(eps > 0)) fail(Error::Kind::config, "tridiag: epsilon must be positive");
  if (T.norm_bound > 1.0 + 1e-12)
    fail(Error::Kind::precondition, "tridiag: requires norm_bound <= 1");
  if (static_cast<int>(lambdas.size()) < p.N || static_cast<int>(mus.size()) < p.N ||
      static_cast<int>(nus.size()) < p.N)
    fail(Error::Kind::config, "tridiag: sequence prefixes shorter than N");

  const double off_cap = eps * std::sqrt(eps) / 16.0;
  for (int n = 1; n <= p.N; ++n) {
    if (T.we_region.dist_to_boundary(lambdas[n - 1]) <= 2 * eps)
      fail(Error::Kind::precondition,
           "tridiag: dist(lambda_" + std::to_string(n) + ", boundary W_e) <= 2 eps");
    if (std::abs(mus[n - 1]) >= off_cap || std::abs(nus[n - 1]) >= off_cap)
      fail(Error::Kind::precondition,
           "tridiag: |mu_n| or |nu_n| >= eps sqrt(eps)/16 at n = " + std::to_string(n));
  }

  const double b_scale = eps * std::sqrt(eps) / 32.0;
  const double z_cap = std::sqrt(eps) / 2.0;

  BuildState state;
  state.construction = "tridiag";
  state.constants["epsilon"] = eps;

  std::deque<FinVec> tu, tsu;
  std::map<int, int> seed_usage;       // m(k) counts for k >= 2
  std::map<int, FinVec> seed_resid;    // cached (I - P_{n-1}) y_m per used label
  int max_label = 0;

  Lemma2dState prev;   // perturbation state of step n-1 (holds w, w', solver)
  FinVec prev_zb;      // z_{n-1} + b_{n-1}
  double prev_s = 1.0;

  for (int n = 1; n <= p.N; ++n) {
    const cx lam = lambdas[n - 1];
    StepRecord rec;
    rec.n = n;
    rec.kind = "tridiag";
    rec.lambda = lam;

    detail::ConstraintSet cons;
    for (std::size_t j = 0; j < state.us.size(); ++j) {
      cons.add(state.us[j]);
      cons.add(tu[j]);
      cons.add(tsu[j]);
    }

    FinVec u_n;
    if (n == 1) {
      prev = lemma2d_state(T, lam, eps, cons.ptrs, 2, p.window);
      u_n = prev.u;
      prev_zb = FinVec{};
      prev_s = 1.0;
      rec.z_norm = 0.0;
      rec.b_norm = 0.0;
      rec.scale_s = 1.0;
      rec.lambda_prime = lam;
    } else {
      // Admissible seeds: y_m not yet absorbed whose residual has projection
      // onto span{u_{n-1}, T u_{n-1}, T* u_{n-1}} at most eps/32 of its norm.
      std::vector<FinVec> span3;
      for (const FinVec* cand : std::initializer_list<const FinVec*>{
               &state.us[state.us.size() - 1], &tu.back(), &tsu.back()}) {
        FinVec q = seqspace::residual(*cand, span3);
        double qn = q.norm();
        if (qn > 1e-12) span3.push_back(q.scaled(cx{1.0 / qn, 0}));
      }
      // Minimize m + (times used) over admissible labels. Used labels carry
      // cached residuals and are tested exactly; fresh labels are tested by
      // a conservative overlap bound that is exact whenever e_m is untouched
      // by every u_j (the usual case). Enumeration stops once no larger
      // fresh label can beat the current best score; a basis vector past
      // every support is always admissible, so this terminates.
      index_t support_horizon = 2;
      for (std::size_t j = 0; j < state.us.size(); ++j)
        support_horizon = std::max({support_horizon, state.us[j].max_index() + 2,
                                    tu[j].max_index() + 2, tsu[j].max_index() + 2});
      int chosen = -1;
      double chosen_score = 0;
      for (int m = 1; m <= support_horizon; ++m) {
        if (chosen >= 0 && m > chosen_score) break;
        bool admissible = false;
        if (seed_resid.count(m)) {
          const FinVec& r = seed_resid.at(m);
          const double rn = r.norm();
          if (rn > seqspace::kResidualMixFloor) {
            KahanSum proj;
            for (const auto& q : span3) proj.add(std::norm(inner_product(r, q)));
            admissible = std::sqrt(proj.value()) <= rn * eps / 32.0;
          }
        } else {
          KahanSum overlap_sq;  // |<e_m, u_j>|^2 over the family
          for (std::size_t j = 0; j < state.us.size(); ++j)
            overlap_sq.add(std::norm(state.us[j].at(m)));
          const double s1 = overlap_sq.value();
          if (s1 < 1.0 - 1e-12) {
            const double rn = std::sqrt(1.0 - s1);
            KahanSum q_sq;
            for (const auto& q : span3) q_sq.add(std::norm(q.at(m)));
            const double bound = std::sqrt(q_sq.value()) +
                                 std::sqrt(static_cast<double>(span3.size()) * s1);
            admissible = bound <= rn * eps / 32.0;
          }
        }
        if (!admissible) continue;
        const double score = m + (seed_usage.count(m) ? seed_usage[m] : 0);
        if (chosen < 0 || score < chosen_score - 1e-12) {
          chosen = m;
          chosen_score = score;
        }
      }
      if (chosen < 0)
        fail(Error::Kind::construction,
             "tridiag step " + std::to_string(n) + ": no admissible seed at this horizon");
      max_label = std::max(max_label, chosen);
      ++seed_usage[chosen];
      rec.seed_m = chosen;
      state.ensure_seed(chosen, chosen);
      if (!seed_resid.count(chosen))
        seed_resid[chosen] = seqspace::residual(FinVec::basis(chosen), state.us);
      const FinVec& chosen_resid = seed_resid.at(chosen);

      FinVec b = chosen_resid.scaled(cx{b_scale / chosen_resid.norm(), 0});
      rec.b_norm = b.norm();

      const cx alpha =
          (mus[n - 2] - inner_product(tu.back(), b)) / prev_s;
      const cx beta =
          (std::conj(nus[n - 2]) - inner_product(tsu.back(), b)) / prev_s;
      FinVec z = prev.z_for(alpha, beta);
      const double zn = z.norm();
      rec.z_norm = zn;
      if (zn > z_cap + 1e-10)
        fail(Error::Kind::audit, "tridiag step " + std::to_string(n) + ": |z_n| exceeds sqrt(eps)/2");

      FinVec zb = z;
      zb.add_scaled(b, cx{1, 0});
      const double zb_sq = zb.norm_sq();
      if (zb_sq > 8.0 * eps / 25.0 + 1e-10)
        fail(Error::Kind::audit, "tridiag step " + std::to_string(n) + ": |z+b|^2 exceeds 8 eps/25");
      const double s_n = std::sqrt(1.0 - zb_sq);
      if (s_n < 0.8 - 1e-12)
        fail(Error::Kind::audit, "tridiag step " + std::to_string(n) + ": normalization below 4/5");
      rec.scale_s = s_n;

      const cx lam_prime = (lam - inner_product(T.apply(zb), zb)) / (1.0 - zb_sq);
      rec.lambda_prime = lam_prime;
      if (std::abs(lam_prime - lam) > eps + 1e-10)
        fail(Error::Kind::audit,
             "tridiag step " + std::to_string(n) + ": |lambda' - lambda| exceeds eps");

      cons.add_with_images(T, *state.seed_by_label(chosen));
      cons.add_with_images(T, z);
      cons.add_with_images(T, b);
      Lemma2dState cur = lemma2d_state(T, lam_prime, eps, cons.ptrs, 2, p.window);

      u_n = cur.u.scaled(cx{s_n, 0});
      u_n.add_scaled(zb, cx{1, 0});
      prev = std::move(cur);
      prev_zb = std::move(zb);
      prev_s = s_n;
    }
    u_n.normalize();

    FinVec Tu_n = T.apply(u_n);
    FinVec Tsu_n = T.apply_adjoint(u_n);
    if (std::abs(inner_product(Tu_n, u_n) - lam) > p.entry_tol)
      fail(Error::Kind::audit, "tridiag step " + std::to_string(n) + ": diagonal audit failed");
    if (n >= 2) {
      const FinVec& u_prev = state.us[state.us.size() - 1];
      if (std::abs(inner_product(tu.back(), u_n) - mus[n - 2]) > p.entry_tol)
        fail(Error::Kind::audit, "tridiag step " + std::to_string(n) + ": mu audit failed");
      if (std::abs(inner_product(Tu_n, u_prev) - nus[n - 2]) > p.entry_tol)
        fail(Error::Kind::audit, "tridiag step " + std::to_string(n) + ": nu audit failed");
    }
    detail::audit_gram_row(state.us, u_n, n, p.gram_tol);

    for (auto& [label, r] : seed_resid) r.add_scaled(u_n, -inner_product(r, u_n));
    state.us.push_back(std::move(u_n));
    tu.push_back(std::move(Tu_n));
    tsu.push_back(std::move(Tsu_n));
    state.steps.push_back(std::move(rec));
  }
  return state;
}

}  // namespace opforge::forge
