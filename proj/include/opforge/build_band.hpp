// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <deque>
#include <vector>

#include "opforge/lemmas.hpp"
#include "opforge/numrange.hpp"
#include "opforge/partition.hpp"
#include "opforge/records.hpp"

namespace opforge::forge {

struct BandParams {
  int K = 1;
  int N = 0;
  numrange::WindowPolicy window;
  double diag_tol = 1e-9;      // prescribed-entry audit
  double band_tol = 1e-9;      // zero-band audit
  double gram_tol = 1e-10;
  double decrement_rel_tol = 1e-6;
  // seed family y_m by label; empty means the standard basis e_m. Must be a
  // finite-band orthonormal family.
  std::function<FinVec(int)> seed_fn;
};

namespace detail {

struct ConstraintSet {
  std::vector<const FinVec*> ptrs;
  std::deque<FinVec> storage;  // stable home for images and temporaries

  void add(const FinVec& v) { ptrs.push_back(&v); }
  void add_owned(FinVec v) {
    storage.push_back(std::move(v));
    ptrs.push_back(&storage.back());
  }
  void add_with_images(const seqspace::OperatorModel& T, const FinVec& v) {
    append_with_images(ptrs, storage, T, v);
  }
};

inline void audit_gram_row(const seqspace::OrthoFamily& us, const FinVec& u, int n,
                           double tol) {
  double worst = std::abs(u.norm() - 1.0);
  for (std::size_t j = 0; j < us.size(); ++j)
    worst = std::max(worst, std::abs(inner_product(u, us[j])));
  if (worst > tol)
    fail(Error::Kind::audit, "step " + std::to_string(n) + ": Gram error " +
                                 std::to_string(worst) + " exceeds " + std::to_string(tol));
}

}  // namespace detail

/// Reflected target: the unique mu with
/// (<T b, b> - lambda)/rho = (lambda - mu)/delta, i.e. lambda pushed by
/// delta away from the residual direction's value. rho = 0 returns lambda.
inline cx band_reflect(cx lambda, double delta, cx tbb) {
  const double rho = std::abs(tbb - lambda);
  if (rho < 1e-13) return lambda;
  return lambda - delta * (tbb - lambda) / rho;
}

/// Orthonormal u_1..u_N with <T u_n, u_n> = lambda_n and <T u_n, u_j> = 0
/// for 1 <= |n - j| <= K. Steps in the selected residue class mix in the
/// current seed's residual direction so that every seed's distance to
/// span(u_1..u_n) decays by the recorded factor; the other steps pick fresh
/// far-window states protecting the seed of the next in-class step.
inline BuildState build_banded_diagonal(const seqspace::OperatorModel& T,
                                        const std::vector<cx>& lambdas, const BandParams& p) {
  if (p.N < 1) fail(Error::Kind::config, "band: N must be >= 1");
  if (p.K < 0) fail(Error::Kind::config, "band: K must be >= 0");
  const int horizon_needed = p.N + p.K + 2;
  if (static_cast<int>(lambdas.size()) < horizon_needed)
    fail(Error::Kind::config, "band: lambda prefix shorter than N + K + 2");
  const auto& region = T.we_region;
  for (int n = 1; n <= p.N; ++n)
    if (region.dist_to_boundary(lambdas[n - 1]) <= 0)
      fail(Error::Kind::precondition,
           "band: lambda_" + std::to_string(n) + " not in the interior of W_e");

  const int r0 = select_residue_class(lambdas, region, p.K);

  // In-class positions and their greedy seed partition over the horizon.
  std::vector<int> in_class;  // n values
  std::vector<double> weights;
  for (int n = 1; n <= static_cast<int>(lambdas.size()); ++n)
    if (n % (p.K + 1) == r0) {
      in_class.push_back(n);
      weights.push_back(region.dist_to_boundary(lambdas[n - 1]));
    }
  GreedyPartition part = greedy_block_partition(weights);
  std::vector<int> seed_of_n(lambdas.size() + 1, 0);
  for (std::size_t i = 0; i < in_class.size(); ++i)
    seed_of_n[static_cast<std::size_t>(in_class[i])] = part.seed_of[i];

  BuildState state;
  state.construction = "band";
  state.constants["K"] = p.K;
  state.constants["r0"] = r0;

  std::deque<FinVec> tu, tsu;  // cached T u_j, T* u_j

  for (int n = 1; n <= p.N; ++n) {
    const cx lam = lambdas[n - 1];
    StepRecord rec;
    rec.n = n;
    rec.lambda = lam;

    detail::ConstraintSet cons;
    for (std::size_t j = 0; j < state.us.size(); ++j) {
      cons.add(state.us[j]);
      cons.add(tu[j]);
      cons.add(tsu[j]);
    }

    FinVec u_n;
    const bool on_class = (n % (p.K + 1) == r0);
    if (!on_class) {
      rec.kind = "band_off";
      // protect the seed of the next in-class step
      int nhat = n + 1;
      while (nhat % (p.K + 1) != r0) ++nhat;
      int m = seed_of_n[static_cast<std::size_t>(nhat)];
      rec.seed_m = m;
      state.ensure_seed(m, m, p.seed_fn);
      cons.add_with_images(T, *state.seed_by_label(m));
      auto found = numrange::find_state_in_complement(T, cons.ptrs, lam,
                                                      margin_for(region, lam), 1, p.window);
      rec.window_start = found.window_start;
      rec.window_length = found.window_length;
      u_n = std::move(found.v);
    } else {
      const int m = seed_of_n[static_cast<std::size_t>(n)];
      rec.seed_m = m;
      state.ensure_seed(m, m, p.seed_fn);
      const FinVec& y = *state.seed_by_label(m);
      FinVec r = seqspace::residual(y, state.us);
      const double rn = r.norm();
      if (rn <= seqspace::kResidualMixFloor) {
        rec.kind = "band_direct";
        rec.seed_in_span = true;
        auto found = numrange::find_state_in_complement(T, cons.ptrs, lam,
                                                        margin_for(region, lam), 1, p.window);
        rec.window_start = found.window_start;
        rec.window_length = found.window_length;
        u_n = std::move(found.v);
      } else {
        rec.kind = "band";
        rec.seed_in_span = false;
        FinVec b = r.scaled(cx{1.0 / rn, 0});
        b = seqspace::residual(b, state.us);  // restore orthogonality at unit scale
        b *= cx{1.0 / b.norm(), 0};
        const cx tbb = inner_product(T.apply(b), b);
        const double rho = std::abs(tbb - lam);
        const double delta = 0.5 * region.dist_to_boundary(lam);
        rec.rho = rho;
        rec.delta = delta;
        rec.resid_before_sq = rn * rn;
        rec.decrement_factor = 1.0 - delta / (rho + delta);
        if (rho < 1e-13) {
          // <T b, b> = lambda: u_n is the residual direction itself.
          rec.mu = lam;
          u_n = std::move(b);
        } else {
          const cx mu = band_reflect(lam, delta, tbb);
          rec.mu = mu;
          cons.add_with_images(T, b);
          auto found = numrange::find_state_in_complement(T, cons.ptrs, mu,
                                                          margin_for(region, mu), 1, p.window);
          rec.window_start = found.window_start;
          rec.window_length = found.window_length;
          u_n = seqspace::lin_comb({{cx{std::sqrt(rho / (rho + delta)), 0}, &found.v},
                                    {cx{std::sqrt(delta / (rho + delta)), 0}, &b}});
        }
        u_n.normalize();
        const double after = rn * rn - std::norm(inner_product(y, u_n));
        rec.resid_after_sq = after;
        const double expected = rn * rn * (*rec.decrement_factor);
        if (std::abs(after - expected) > p.decrement_rel_tol * std::max(1e-300, expected) + 1e-14)
          fail(Error::Kind::audit,
               "band step " + std::to_string(n) + ": decrement identity off");
      }
    }
    u_n.normalize();

    // audits: prescribed diagonal, zero band, orthonormality
    FinVec Tu_n = T.apply(u_n);
    FinVec Tsu_n = T.apply_adjoint(u_n);
    if (std::abs(inner_product(Tu_n, u_n) - lam) > p.diag_tol)
      fail(Error::Kind::audit, "band step " + std::to_string(n) + ": diagonal audit failed");
    for (int j = std::max(1, n - p.K); j <= n - 1; ++j) {
      const FinVec& u_j = state.us[static_cast<std::size_t>(j - 1)];
      if (std::abs(inner_product(tu[static_cast<std::size_t>(j - 1)], u_n)) > p.band_tol ||
          std::abs(inner_product(Tu_n, u_j)) > p.band_tol)
        fail(Error::Kind::audit, "band step " + std::to_string(n) + ": zero-band audit failed");
    }
    detail::audit_gram_row(state.us, u_n, n, p.gram_tol);

    state.us.push_back(std::move(u_n));
    tu.push_back(std::move(Tu_n));
    tsu.push_back(std::move(Tsu_n));
    state.steps.push_back(std::move(rec));
  }
  return state;
}

}  // namespace opforge::forge
