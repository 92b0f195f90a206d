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
#include "opforge/partition.hpp"
#include "opforge/records.hpp"

namespace opforge::forge {

struct SmallParams {
  int N = 0;
  numrange::WindowPolicy window;
  double bound_rel_slack = 1e-8;   // |entry| <= sqrt(a_n a_j) * (1 + slack)
  double gram_tol = 1e-10;
  double decrement_rel_tol = 1e-6;
  // seed family y_m by label; empty means the standard basis e_m
  std::function<FinVec(int)> seed_fn;
};

namespace detail {

/// Unit far-window state with |<T v, v>| < cap. Targets 0 exactly when the
/// region has usable interior there; otherwise walks the window's boundary
/// sweep for its smallest attained value (enough when 0 is only a boundary
/// or limit point of W_e).
inline numrange::ComplementState small_value_state(const seqspace::OperatorModel& T,
                                                   const std::vector<const FinVec*>& constraints,
                                                   double cap,
                                                   const numrange::WindowPolicy& policy) {
  const auto& region = T.we_region;
  const bool interior = region.kind() != numrange::ConvexRegion::Kind::point &&
                        region.kind() != numrange::ConvexRegion::Kind::segment &&
                        region.dist_to_boundary(cx{0, 0}) > 0;
  if (interior)
    return numrange::find_state_in_complement(T, constraints, cx{0, 0},
                                              margin_for(region, cx{0, 0}), 1, policy);

  index_t horizon = -1;
  for (const auto* c : constraints)
    if (c) horizon = std::max(horizon, c->max_index());
  const index_t start = std::max<index_t>(1, horizon + 1 + T.band_width);
  for (index_t len = policy.initial_length; len <= policy.max_length; len *= 2) {
    numrange::CompressionWindow win{start, len, {}};
    numrange::Matrix M = win.base_matrix(T);
    numrange::detail::BoundaryOracle oracle(M);
    numrange::BoundarySweep sweep;
    std::vector<double> angles;
    for (int i = 0; i < 32; ++i) angles.push_back(numrange::kTwoPi * i / 32);
    numrange::detail::extend_sweep(oracle, sweep, angles);
    std::size_t best = 0;
    for (std::size_t i = 1; i < sweep.points.size(); ++i)
      if (std::abs(sweep.points[i].value) < std::abs(sweep.points[best].value)) best = i;
    if (std::abs(sweep.points[best].value) < cap / 2) {
      FinVec v = win.lift(numrange::Matrix::Identity(len, len), sweep.points[best].state);
      return {std::move(v), start, len};
    }
  }
  fail(Error::Kind::construction,
       "small_value_state: no sufficiently small value in reachable windows; is 0 in W_e?");
}

}  // namespace detail

/// Orthonormal u_1..u_N with |<T u_n, u_j>| <= sqrt(a_n a_j) for all pairs.
/// Runs on T / norm_bound when the model is not a contraction; the clean
/// bound then reads norm_bound * sqrt(a_n a_j) for the original operator
/// (recorded as constant "norm_scale").
inline BuildState build_small_entries(const seqspace::OperatorModel& T_in,
                                      const std::vector<double>& a, const SmallParams& p) {
  if (p.N < 1) fail(Error::Kind::config, "small: N must be >= 1");
  if (static_cast<int>(a.size()) < p.N)
    fail(Error::Kind::config, "small: weight prefix shorter than N");
  for (double w : a)
    if (w <= 0) fail(Error::Kind::precondition, "small: weights must be positive");
  if (!T_in.we_region.contains(cx{0, 0}, 1e-12))
    fail(Error::Kind::precondition, "small: 0 not in W_e");

  const double scale = T_in.norm_bound > 1.0 ? T_in.norm_bound : 1.0;
  const seqspace::OperatorModel T =
      scale != 1.0 ? seqspace::make_affine(T_in, cx{1.0 / scale, 0}, cx{0, 0}) : T_in;

  SparsifiedWeights sw = sparsify_weights(a);
  std::vector<double> aprime_prefix(sw.a_prime.begin(), sw.a_prime.begin() + p.N);
  GreedyPartition part = greedy_block_partition(aprime_prefix);

  BuildState state;
  state.construction = "small";
  state.constants["norm_scale"] = scale;

  // Protect every seed the horizon uses at every step: the exact d(n) index
  // grows like exp(n^2) for decaying weights and is not representable, while
  // this superset preserves all the orthogonality the per-step identities
  // need within the horizon.
  for (int i = 0; i < p.N; ++i)
    state.ensure_seed(part.seed_of[static_cast<std::size_t>(i)],
                      part.seed_of[static_cast<std::size_t>(i)], p.seed_fn);

  // d(n) over the tabulated prefix: ratios a'_k / a_k are <= 1/block(k), so
  // once 1/block(H) < a_n the tail past H is certified too.
  const std::size_t H = a.size();
  std::vector<double> ratio(H);
  for (std::size_t k = 0; k < H; ++k) ratio[k] = sw.a_prime[k] / a[k];
  auto d_of = [&](int n) -> index_t {
    const double an = a[static_cast<std::size_t>(n - 1)];
    if (1.0 / sw.block_index[H - 1] >= an) return -1;  // tail not certifiable in prefix
    std::size_t last_bad = 0;
    bool any_bad = false;
    for (std::size_t k = 0; k < H; ++k)
      if (ratio[k] >= an) {
        last_bad = k;
        any_bad = true;
      }
    index_t d = any_bad ? static_cast<index_t>(last_bad) + 2 : 1;  // 1-based, one past
    return std::max<index_t>(d, n);
  };

  std::deque<FinVec> tu, tsu;
  std::map<int, FinVec> seed_resid;
  for (std::size_t i = 0; i < state.seed_labels.size(); ++i)
    seed_resid[state.seed_labels[i]] = state.seeds[i];

  for (int n = 1; n <= p.N; ++n) {
    const double an = a[static_cast<std::size_t>(n - 1)];
    const double apn = sw.a_prime[static_cast<std::size_t>(n - 1)];
    const int m = part.seed_of[static_cast<std::size_t>(n - 1)];
    StepRecord rec;
    rec.n = n;
    rec.kind = "small";
    rec.seed_m = m;
    rec.a_n = an;
    rec.a_prime_n = apn;
    rec.d_n = d_of(n);

    detail::ConstraintSet cons;
    for (std::size_t j = 0; j < state.us.size(); ++j) {
      cons.add(state.us[j]);
      cons.add(tu[j]);
      cons.add(tsu[j]);
    }
    for (const auto& y : state.seeds) cons.add_with_images(T, y);

    auto found = detail::small_value_state(T, cons.ptrs, apn / 2, p.window);
    rec.window_start = found.window_start;
    rec.window_length = found.window_length;
    FinVec v = std::move(found.v);
    if (std::abs(inner_product(T.apply(v), v)) >= apn / 2)
      fail(Error::Kind::construction, "small step " + std::to_string(n) + ": |<Tv,v>| >= a'_n/2");

    const FinVec& y = *state.seed_by_label(m);
    const FinVec& r = seed_resid.at(m);
    const double rn = r.norm();
    FinVec u_n;
    if (rn <= seqspace::kResidualMixFloor) {
      rec.seed_in_span = true;
      u_n = std::move(v);
    } else {
      rec.seed_in_span = false;
      const double c = std::sqrt(apn) / 2;
      rec.c_n = c;
      FinVec w = r.scaled(cx{1.0 / rn, 0});
      w = seqspace::residual(w, state.us);
      w *= cx{1.0 / w.norm(), 0};
      u_n = seqspace::lin_comb({{cx{std::sqrt(1.0 - c * c), 0}, &v}, {cx{c, 0}, &w}});
      rec.resid_before_sq = rn * rn;
      rec.decrement_factor = 1.0 - apn / 4;
    }
    u_n.normalize();

    if (rec.resid_before_sq) {
      const double after = *rec.resid_before_sq - std::norm(inner_product(y, u_n));
      rec.resid_after_sq = after;
      const double expected = *rec.resid_before_sq * (*rec.decrement_factor);
      if (std::abs(after - expected) > p.decrement_rel_tol * std::max(1e-300, expected) + 1e-14)
        fail(Error::Kind::audit, "small step " + std::to_string(n) + ": decrement identity off");
    }

    FinVec Tu_n = T.apply(u_n);
    FinVec Tsu_n = T.apply_adjoint(u_n);
    if (std::abs(inner_product(Tu_n, u_n)) > an)
      fail(Error::Kind::audit, "small step " + std::to_string(n) + ": diagonal bound failed");
    for (int j = 1; j < n; ++j) {
      const double cap = std::sqrt(an * a[static_cast<std::size_t>(j - 1)]) *
                         (1.0 + p.bound_rel_slack);
      if (std::abs(inner_product(tu[static_cast<std::size_t>(j - 1)], u_n)) > cap ||
          std::abs(inner_product(Tu_n, state.us[static_cast<std::size_t>(j - 1)])) > cap)
        fail(Error::Kind::audit, "small step " + std::to_string(n) + ": entry bound failed vs j=" +
                                     std::to_string(j));
    }
    detail::audit_gram_row(state.us, u_n, n, p.gram_tol);

    for (auto& [label, rv] : seed_resid) rv.add_scaled(u_n, -inner_product(rv, u_n));
    state.us.push_back(std::move(u_n));
    tu.push_back(std::move(Tu_n));
    tsu.push_back(std::move(Tsu_n));
    state.steps.push_back(std::move(rec));
  }
  return state;
}

}  // namespace opforge::forge
