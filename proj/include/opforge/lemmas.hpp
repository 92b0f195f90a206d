// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <deque>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/numrange.hpp"
#include "opforge/operator_model.hpp"
#include "opforge/ortho.hpp"

namespace opforge::forge {

using seqspace::FinVec;
using seqspace::OperatorModel;
using seqspace::inner_product;

inline double margin_for(const numrange::ConvexRegion& region, cx target) {
  double d = region.dist_to_boundary(target);
  if (region.kind() == numrange::ConvexRegion::Kind::segment) {
    const auto& v = region.vertices();
    d = std::min(std::abs(target - v[0]), std::abs(target - v[1]));
  }
  if (d <= 0) fail(Error::Kind::precondition, "target not in the interior of W_e");
  return d / 4.0;
}

/// Adds v, Tv, T*v to a constraint list. The deque keeps references stable
/// as more images accumulate.
inline void append_with_images(std::vector<const FinVec*>& constraints,
                               std::deque<FinVec>& storage, const OperatorModel& T,
                               const FinVec& v) {
  storage.push_back(T.apply(v));
  storage.push_back(T.apply_adjoint(v));
  constraints.push_back(&v);
  constraints.push_back(&storage[storage.size() - 2]);
  constraints.push_back(&storage[storage.size() - 1]);
}

// Two-dimensional perturbation state: a unit u with
// <T u, u> = lambda inside the constraint complement, together with a solver
// producing z in span{w, w'} that realizes prescribed pairings against
// w = Tu - <Tu,u>u and w' = T*u - <T*u,u>u with norm <= 2(|a|+|b|)/eps.
struct Lemma2dState {
  FinVec u;
  FinVec w, w_prime;
  FinVec g1, g2;       // (I-P')w and (I-P)w', the biorthogonal directions
  double g1_norm_sq = 0.0, g2_norm_sq = 0.0;
  double epsilon = 0.0;

  FinVec z_for(cx alpha, cx beta) const {
    // <w, .> is conjugate-linear in z, so the coefficients enter conjugated
    FinVec z;
    if (alpha != cx{0, 0}) z.add_scaled(g1, std::conj(alpha) / g1_norm_sq);
    if (beta != cx{0, 0}) z.add_scaled(g2, std::conj(beta) / g2_norm_sq);
    return z;
  }
};

/// Builds the state from four states with values lambda +- eps and
/// lambda +- i*eps, each found in a fresh far window. image_depth 2 keeps
/// second-order images (T applied to span{u, Tu, T*u}) clear of the
/// constraints, which the tridiagonal chain relies on.
inline Lemma2dState lemma2d_state(const OperatorModel& T, cx lambda, double eps,
                                  const std::vector<const FinVec*>& constraints,
                                  int image_depth = 2,
                                  const numrange::WindowPolicy& policy = {}) {
  if (eps <= 0) fail(Error::Kind::precondition, "lemma2d_state: eps must be positive");
  if (T.norm_bound > 1.0 + 1e-12)
    fail(Error::Kind::precondition, "lemma2d_state: requires norm_bound <= 1");
  if (T.we_region.dist_to_boundary(lambda) <= eps)
    fail(Error::Kind::precondition, "lemma2d_state: dist(lambda, boundary W_e) must exceed eps");

  const cx targets[4] = {lambda + eps, lambda + cx{0, eps}, lambda - eps, lambda - cx{0, eps}};
  std::vector<const FinVec*> cons = constraints;
  std::deque<FinVec> storage;
  std::deque<FinVec> states;
  for (cx t : targets) {
    auto found = numrange::find_state_in_complement(T, cons, t, margin_for(T.we_region, t),
                                                    image_depth, policy);
    states.push_back(std::move(found.v));
    append_with_images(cons, storage, T, states.back());
  }

  Lemma2dState out;
  out.epsilon = eps;
  out.u = seqspace::lin_comb({{cx{0.5, 0}, &states[0]},
                              {cx{0.5, 0}, &states[1]},
                              {cx{0.5, 0}, &states[2]},
                              {cx{0.5, 0}, &states[3]}});
  out.u.normalize();

  FinVec Tu = T.apply(out.u);
  FinVec Tsu = T.apply_adjoint(out.u);
  cx diag = inner_product(Tu, out.u);
  cx diag_adj = inner_product(Tsu, out.u);
  out.w = Tu;
  out.w.add_scaled(out.u, -diag);
  out.w_prime = Tsu;
  out.w_prime.add_scaled(out.u, -diag_adj);

  const double wn = out.w.norm(), wpn = out.w_prime.norm();
  if (wn < eps / 2 - 1e-8 || wpn < eps / 2 - 1e-8)
    fail(Error::Kind::construction,
         "lemma2d_state: |w| or |w'| fell below eps/2 (" + std::to_string(wn) + ", " +
             std::to_string(wpn) + ")");

  out.g1 = out.w;
  out.g1.add_scaled(out.w_prime, -inner_product(out.w, out.w_prime) / sqr(wpn));
  out.g2 = out.w_prime;
  out.g2.add_scaled(out.w, -inner_product(out.w_prime, out.w) / sqr(wn));
  out.g1_norm_sq = out.g1.norm_sq();
  out.g2_norm_sq = out.g2.norm_sq();
  if (std::sqrt(out.g1_norm_sq) < eps / 2 - 1e-8 || std::sqrt(out.g2_norm_sq) < eps / 2 - 1e-8)
    fail(Error::Kind::construction,
         "lemma2d_state: biorthogonal directions shorter than eps/2; w, w' nearly parallel");
  return out;
}

// Admissible constants for the diameter-pair state: 0 < C < diam/(4 sqrt 2),
// 0 < D < diam/4, both with strict slack.
struct PearcyConstants {
  double C = 0.0;
  double D = 0.0;
  double eps_p = 0.0;  // <= 0 means: derive the largest safe value
};

/// Unit u orthogonal to the constraints with |<Tu,u>| >= D and both
/// |Tu - <Tu,u>u|, |T*u - <T*u,u>u| >= C, built as (x + y)/sqrt(2) from
/// states near a diameter-realizing pair of W_e and its midpoint.
inline FinVec pearcy_state(const OperatorModel& T, const std::vector<const FinVec*>& constraints,
                           const PearcyConstants& k,
                           const numrange::WindowPolicy& policy = {}) {
  const auto& region = T.we_region;
  const double diam = region.diameter();
  if (diam <= 0)
    fail(Error::Kind::precondition, "pearcy_state: W_e is a single point (lambda*I + compact)");
  if (!(k.C > 0 && k.C < diam / (4 * std::sqrt(2.0)) - 1e-6))
    fail(Error::Kind::precondition, "pearcy_state: C outside (0, diam/(4 sqrt 2)) with slack");
  if (!(k.D > 0 && k.D < diam / 4 - 1e-6))
    fail(Error::Kind::precondition, "pearcy_state: D outside (0, diam/4) with slack");

  auto [lam, nu] = region.diameter_pair();
  const cx mu = 0.5 * (lam + nu);
  const double cap = std::min(std::abs(lam + mu) / 2 - k.D,
                              std::abs(lam - mu) / 2 - k.C * std::sqrt(2.0));
  double eps_p = k.eps_p > 0 ? k.eps_p : 0.9 * cap;
  if (!(eps_p > 0 && eps_p < cap))
    fail(Error::Kind::precondition, "pearcy_state: eps_p outside (0, min(|l+m|/2-D, |l-m|/2-C sqrt 2))");

  // Diameter endpoints sit on the boundary; nudge targets toward the deep
  // interior point by eps_p/2 so they certify with positive margin.
  auto nudge = [&](cx target) {
    cx inward = region.interior_point() - target;
    double dist = std::abs(inward);
    if (dist < 1e-15) return target;
    double step = std::min(eps_p / 2, dist);
    return target + inward / dist * step;
  };

  cx lam_t = nudge(lam);
  auto fx = numrange::find_state_in_complement(T, constraints, lam_t,
                                               margin_for(region, lam_t), 1, policy);
  cx got_x = inner_product(T.apply(fx.v), fx.v);
  if (std::abs(got_x - lam) >= eps_p)
    fail(Error::Kind::construction, "pearcy_state: x-state missed lambda by >= eps_p");

  std::vector<const FinVec*> cons = constraints;
  std::deque<FinVec> storage;
  append_with_images(cons, storage, T, fx.v);
  cx mu_t = region.dist_to_boundary(mu) >= eps_p / 2 &&
                    region.kind() != numrange::ConvexRegion::Kind::segment
                ? mu
                : nudge(mu);
  auto fy = numrange::find_state_in_complement(T, cons, mu_t, margin_for(region, mu_t), 1, policy);
  cx got_y = inner_product(T.apply(fy.v), fy.v);
  if (std::abs(got_y - mu) >= eps_p)
    fail(Error::Kind::construction, "pearcy_state: y-state missed mu by >= eps_p");

  FinVec u = seqspace::lin_comb({{cx{1, 0}, &fx.v}, {cx{1, 0}, &fy.v}});
  u *= cx{1.0 / std::sqrt(2.0), 0};
  u.normalize();

  // Re-verify the three bounds directly; tolerance 1e-9 on each.
  FinVec Tu = T.apply(u), Tsu = T.apply_adjoint(u);
  cx d0 = inner_product(Tu, u);
  FinVec w = Tu;
  w.add_scaled(u, -d0);
  FinVec wp = Tsu;
  wp.add_scaled(u, -inner_product(Tsu, u));
  if (std::abs(d0) < k.D - 1e-9 || w.norm() < k.C - 1e-9 || wp.norm() < k.C - 1e-9)
    fail(Error::Kind::construction, "pearcy_state: verified bounds failed");
  return u;
}

}  // namespace opforge::forge
