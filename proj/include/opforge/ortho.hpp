// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "opforge/finvec.hpp"

namespace opforge::seqspace {

// Ordered orthonormal family (u_n). The builders are responsible for keeping
// the Gram error inside gram_tolerance; worst_gram_error re-measures it.
class OrthoFamily {
public:
  explicit OrthoFamily(double gram_tolerance = 1e-10) : gram_tol_(gram_tolerance) {}

  void push_back(FinVec v) { vecs_.push_back(std::move(v)); }

  std::size_t size() const { return vecs_.size(); }
  bool empty() const { return vecs_.empty(); }
  const FinVec& operator[](std::size_t i) const { return vecs_[i]; }
  const std::vector<FinVec>& vectors() const { return vecs_; }
  double gram_tolerance() const { return gram_tol_; }

  /// max |<u_i, u_j> - delta_ij| over all stored pairs.
  double worst_gram_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < vecs_.size(); ++i)
      for (std::size_t j = i; j < vecs_.size(); ++j) {
        cx g = inner_product(vecs_[i], vecs_[j]);
        double target = (i == j) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(g - cx{target, 0.0}));
      }
    return worst;
  }

  index_t max_support_index() const {
    index_t m = -1;
    for (const auto& v : vecs_) m = std::max(m, v.max_index());
    return m;
  }

private:
  std::vector<FinVec> vecs_;
  double gram_tol_;
};

/// Residual directions r / |r| are only numerically meaningful while |r|
/// stays above this floor: the cancellation in forming r costs about
/// eps / |r| of direction accuracy, so below 1e-4 the direction can be off
/// by more than the 1e-9..1e-10 audit tolerances downstream. Builders treat
/// seeds whose residual falls under the floor as absorbed.
inline constexpr double kResidualMixFloor = 1e-4;

/// (I - P) u where P projects onto span(family). A second orthogonalization
/// pass keeps the result orthogonal to every member to ~1e-15 over hundreds
/// of vectors.
inline FinVec residual(const FinVec& u, const OrthoFamily& family) {
  FinVec r = u;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : family.vectors()) r.add_scaled(q, -inner_product(r, q));
  return r;
}

inline FinVec residual(const FinVec& u, const std::vector<FinVec>& family) {
  FinVec r = u;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : family) r.add_scaled(q, -inner_product(r, q));
  return r;
}

}  // namespace opforge::seqspace
