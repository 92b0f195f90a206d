// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/finvec.hpp"
#include "opforge/ortho.hpp"
#include "opforge/rng.hpp"

namespace opforge::numrange {

struct PlankTarget {
  seqspace::FinVec w;  // unit vector
  double a = 0.0;      // required lower bound for |<v, w>|
};

namespace detail {

/// Maximizes min_j |t_j^* x| / a_j over unit x in C^D. Targets are the
/// columns of `t` (unit columns). Greedy phase alignment seeds the ascent
/// (a per-phase-maximal combination already meets every bound when the
/// targets are near-orthogonal); projected subgradient ascent with restarts
/// polishes the rest. Heuristic by design: the caller must verify.
inline Eigen::VectorXcd plank_solve_dense(const Eigen::MatrixXcd& t,
                                          const std::vector<double>& a, Rng& rng) {
  const Eigen::Index D = t.rows();
  const Eigen::Index K = t.cols();
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < K; ++j)
    if (a[static_cast<std::size_t>(j)] > 0) active.push_back(j);

  auto score = [&](const Eigen::VectorXcd& x) {
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index j : active)
      worst = std::min(worst, std::abs(t.col(j).dot(x)) / a[static_cast<std::size_t>(j)]);
    return worst;
  };

  auto bang_start = [&](bool randomize) {
    Eigen::VectorXcd phases = Eigen::VectorXcd::Ones(K);
    if (randomize)
      for (Eigen::Index j = 0; j < K; ++j)
        phases(j) = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(D);
    for (Eigen::Index j : active) v += phases(j) * a[static_cast<std::size_t>(j)] * t.col(j);
    for (int pass = 0; pass < 6; ++pass) {
      for (Eigen::Index j : active) {
        const double aj = a[static_cast<std::size_t>(j)];
        v -= phases(j) * aj * t.col(j);
        cx c = t.col(j).dot(v);  // t_j^* v
        cx ph = std::abs(c) > 1e-300 ? c / std::abs(c) : cx{1, 0};
        phases(j) = ph;
        v += phases(j) * aj * t.col(j);
      }
    }
    double n = v.norm();
    if (n < 1e-12) {
      for (Eigen::Index i = 0; i < D; ++i) v(i) = rng.normal_cx();
      n = v.norm();
    }
    return Eigen::VectorXcd(v / n);
  };

  Eigen::VectorXcd best;
  double best_score = -1;
  const int restarts = 8;
  for (int r = 0; r < restarts && best_score < 1.0; ++r) {
    Eigen::VectorXcd x = bang_start(r > 0);
    double f = score(x);
    double step = 0.5;
    for (int it = 0; it < 400 && f < 1.0 + 1e-9; ++it) {
      // subgradient of the active minima
      Eigen::VectorXcd g = Eigen::VectorXcd::Zero(D);
      for (Eigen::Index j : active) {
        const double aj = a[static_cast<std::size_t>(j)];
        cx c = t.col(j).dot(x);
        double ratio = std::abs(c) / aj;
        if (ratio <= f * (1.0 + 1e-6) + 1e-12) {
          cx ph = std::abs(c) > 1e-300 ? c / std::abs(c) : cx{1, 0};
          g += (t.col(j) * ph) / aj;
        }
      }
      double gn = g.norm();
      if (gn < 1e-14) break;
      bool improved = false;
      for (int bt = 0; bt < 20; ++bt) {
        Eigen::VectorXcd cand = x + (step / gn) * g;
        cand.normalize();
        double fc = score(cand);
        if (fc > f) {
          x = cand;
          f = fc;
          step = std::min(step * 1.3, 1.0);
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (f > best_score) {
      best_score = f;
      best = x;
    }
  }
  return best;
}

}  // namespace detail

/// Unit v in span(subspace_basis) with |<v, w_j>| >= a_j for every target
/// (validated with slack 1e-10; an optimization shortfall throws instead of
/// returning an invalid certificate).
inline seqspace::FinVec plank_vector(const std::vector<PlankTarget>& targets,
                                     const seqspace::OrthoFamily& subspace_basis, Rng& rng) {
  double weight_sq = 0;
  for (const auto& tgt : targets) {
    if (tgt.a < 0) fail(Error::Kind::precondition, "plank_vector: negative weight");
    weight_sq += tgt.a * tgt.a;
  }
  if (weight_sq > 1.0 + 1e-12)
    fail(Error::Kind::precondition, "plank_vector: sum of squared weights exceeds 1");
  if (subspace_basis.empty()) fail(Error::Kind::precondition, "plank_vector: empty subspace");

  const Eigen::Index D = static_cast<Eigen::Index>(subspace_basis.size());
  const Eigen::Index K = static_cast<Eigen::Index>(targets.size());
  Eigen::MatrixXcd t(D, K);
  std::vector<double> a(targets.size());
  for (Eigen::Index j = 0; j < K; ++j) {
    a[static_cast<std::size_t>(j)] = targets[static_cast<std::size_t>(j)].a;
    for (Eigen::Index i = 0; i < D; ++i) {
      // coordinates in the Eigen convention: t(i, j) = q_i^* w_j
      cx math = seqspace::inner_product(targets[static_cast<std::size_t>(j)].w,
                                        subspace_basis[static_cast<std::size_t>(i)]);
      t(i, j) = math;
    }
  }
  Eigen::VectorXcd x = detail::plank_solve_dense(t, a, rng);

  seqspace::FinVec v;
  for (Eigen::Index i = 0; i < D; ++i)
    v.add_scaled(subspace_basis[static_cast<std::size_t>(i)], x(i));
  v.normalize();

  for (const auto& tgt : targets)
    if (std::abs(seqspace::inner_product(v, tgt.w)) < tgt.a - 1e-10)
      fail(Error::Kind::construction,
           "plank_vector: optimization shortfall, certificate not met");
  return v;
}

}  // namespace opforge::numrange
