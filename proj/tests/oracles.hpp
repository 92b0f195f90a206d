// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, kept independent of the library's sweep/interpolation
// path: plain sampling plus projected gradient ascent on the Rayleigh
// quotient modulus.
#pragma once

#include <Eigen/Dense>

#include "opforge/finvec.hpp"
#include "opforge/rng.hpp"

namespace oracles {

using opforge::cx;
using opforge::Rng;

inline Eigen::VectorXcd random_unit(Eigen::Index dim, Rng& rng) {
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.normal_cx();
  v.normalize();
  return v;
}

inline Eigen::MatrixXcd random_matrix(Eigen::Index dim, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = scale * rng.normal_cx();
  return m;
}

/// max |<M x, x>| over unit x: best of many random samples, then ascent on
/// f(x) = |x* M x| / (x* x) with adaptive step until stationary.
inline double sample_numerical_radius(const Eigen::MatrixXcd& M, int n_samples, Rng& rng,
                                      int polish_starts = 6) {
  const Eigen::Index d = M.rows();
  std::vector<Eigen::VectorXcd> best(static_cast<std::size_t>(polish_starts));
  std::vector<double> best_val(static_cast<std::size_t>(polish_starts), -1.0);
  auto value = [&](const Eigen::VectorXcd& x) { return x.dot(M * x) / x.squaredNorm(); };
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXcd x = random_unit(d, rng);
    double v = std::abs(value(x));
    for (int b = 0; b < polish_starts; ++b)
      if (v > best_val[static_cast<std::size_t>(b)]) {
        best_val.insert(best_val.begin() + b, v);
        best_val.pop_back();
        best.insert(best.begin() + b, x);
        best.pop_back();
        break;
      }
  }
  double out = 0.0;
  for (int b = 0; b < polish_starts; ++b) {
    Eigen::VectorXcd x = best[static_cast<std::size_t>(b)];
    if (x.size() == 0) continue;
    double f = std::abs(value(x));
    double step = 0.25;
    for (int it = 0; it < 4000 && step > 1e-14; ++it) {
      cx val = value(x);
      cx phase = std::abs(val) > 1e-300 ? val / std::abs(val) : cx{1, 0};
      // ascent direction for Re(conj(phase) x* M x): Hermitian part applied to x
      Eigen::VectorXcd g = 0.5 * (std::conj(phase) * (M * x) + phase * (M.adjoint() * x));
      Eigen::VectorXcd cand = x + step * g;
      cand.normalize();
      double fc = std::abs(value(cand));
      if (fc > f + 1e-17) {
        x = cand;
        f = fc;
        step = std::min(step * 1.25, 1.0);
      } else {
        step *= 0.5;
      }
    }
    out = std::max(out, f);
  }
  return out;
}

inline opforge::seqspace::FinVec random_finvec(Rng& rng, opforge::index_t max_index,
                                               int support) {
  opforge::seqspace::FinVec v;
  for (int i = 0; i < support; ++i)
    v.add(rng.uniform_index(max_index), rng.normal_cx());
  return v;
}

}  // namespace oracles
