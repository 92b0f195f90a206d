// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/finvec.hpp"
#include "opforge/region.hpp"

namespace opforge::seqspace {

// Banded entry-oracle operator on l2(N). entry(j, n) is <T e_n, e_j>, zero
// whenever |j - n| > band_width. The essential numerical range is supplied
// analytically: it is an asymptotic object and ill-posed to estimate from
// truncations, so models declare it up front.
struct OperatorModel {
  std::function<cx(index_t row, index_t col)> entry;
  index_t band_width = 0;
  double norm_bound = 0.0;
  numrange::ConvexRegion we_region = numrange::ConvexRegion::point({0, 0});
  std::string kind;

  /// l2(N) is indexed from 1; entries outside N x N vanish.
  cx entry_at(index_t row, index_t col) const {
    if (row < 1 || col < 1) return {0, 0};
    if (std::abs(row - col) > band_width) return {0, 0};
    return entry(row, col);
  }

  /// T x. Support stays within band_width of supp(x).
  FinVec apply(const FinVec& x) const {
    return gather(x, [this](index_t j, index_t n) { return entry_at(j, n); });
  }

  /// T* x, using <T* e_n, e_j> = conj(<T e_j, e_n>).
  FinVec apply_adjoint(const FinVec& x) const {
    return gather(x, [this](index_t j, index_t n) { return std::conj(entry_at(n, j)); });
  }

private:
  template <class EntryFn>
  FinVec gather(const FinVec& x, EntryFn&& coeff) const {
    std::vector<FinVec::entry_type> tmp;
    tmp.reserve(x.support_size() * (2 * static_cast<std::size_t>(band_width) + 1));
    for (const auto& [n, c] : x)
      for (index_t j = std::max<index_t>(1, n - band_width); j <= n + band_width; ++j) {
        cx e = coeff(j, n);
        if (e != cx{0, 0}) tmp.emplace_back(j, e * c);
      }
    std::sort(tmp.begin(), tmp.end(),
              [](const FinVec::entry_type& a, const FinVec::entry_type& b) { return a.first < b.first; });
    std::vector<FinVec::entry_type> combined;
    combined.reserve(tmp.size());
    for (const auto& [j, v] : tmp) {
      if (!combined.empty() && combined.back().first == j)
        combined.back().second += v;
      else
        combined.emplace_back(j, v);
    }
    return FinVec::from_sorted(std::move(combined));
  }

public:
};

/// <T u_col, u_row>.
inline cx matrix_entry(const OperatorModel& T, const FinVec& u_col, const FinVec& u_row) {
  return inner_product(T.apply(u_col), u_row);
}

// ---- model factories ------------------------------------------------------

/// Unilateral shift e_n -> e_{n+1}; essential numerical range is the closed
/// unit disk.
inline OperatorModel make_shift() {
  OperatorModel m;
  m.kind = "shift";
  m.band_width = 1;
  m.norm_bound = 1.0;
  m.we_region = numrange::ConvexRegion::disk({0, 0}, 1.0);
  m.entry = [](index_t j, index_t n) { return j == n + 1 ? cx{1, 0} : cx{0, 0}; };
  return m;
}

/// Weighted shift e_n -> w(n) e_{n+1}.
inline OperatorModel make_weighted_shift(std::function<double(index_t)> weights,
                                         double sup_weight,
                                         numrange::ConvexRegion we) {
  OperatorModel m;
  m.kind = "weighted_shift";
  m.band_width = 1;
  m.norm_bound = sup_weight;
  m.we_region = we;
  auto w = std::make_shared<std::function<double(index_t)>>(std::move(weights));
  m.entry = [w](index_t j, index_t n) { return j == n + 1 ? cx{(*w)(n), 0} : cx{0, 0}; };
  return m;
}

inline OperatorModel make_diagonal(std::function<cx(index_t)> diag, double sup_abs,
                                   numrange::ConvexRegion we) {
  OperatorModel m;
  m.kind = "diagonal";
  m.band_width = 0;
  m.norm_bound = sup_abs;
  m.we_region = we;
  auto d = std::make_shared<std::function<cx(index_t)>>(std::move(diag));
  m.entry = [d](index_t j, index_t n) { return j == n ? (*d)(n) : cx{0, 0}; };
  return m;
}

/// Banded Toeplitz: entry(j, n) = symbol coefficient t_{j-n}. `coeffs` maps
/// offsets in [-b, b] to coefficients.
inline OperatorModel make_toeplitz_banded(std::vector<std::pair<index_t, cx>> coeffs,
                                          numrange::ConvexRegion we) {
  index_t b = 0;
  double norm = 0.0;
  for (const auto& [off, c] : coeffs) {
    b = std::max(b, std::abs(off));
    norm += std::abs(c);
  }
  OperatorModel m;
  m.kind = "toeplitz_banded";
  m.band_width = b;
  m.norm_bound = norm;  // l1 bound on the symbol dominates the operator norm
  m.we_region = we;
  auto table = std::make_shared<std::vector<std::pair<index_t, cx>>>(std::move(coeffs));
  m.entry = [table](index_t j, index_t n) {
    for (const auto& [off, c] : *table)
      if (j - n == off) return c;
    return cx{0, 0};
  };
  return m;
}

/// alpha*T + beta*I, with the region transformed accordingly.
inline OperatorModel make_affine(OperatorModel inner, cx alpha, cx beta) {
  OperatorModel m;
  m.kind = "affine";
  m.band_width = inner.band_width;
  m.norm_bound = std::abs(alpha) * inner.norm_bound + std::abs(beta);
  m.we_region = inner.we_region.affine(alpha, beta);
  auto base = std::make_shared<OperatorModel>(std::move(inner));
  m.entry = [base, alpha, beta](index_t j, index_t n) {
    cx v = alpha * base->entry_at(j, n);
    if (j == n) v += beta;
    return v;
  };
  return m;
}

/// Direct sum of k models on interleaved index classes (index i belongs to
/// block i mod k and acts as inner index i div k).
inline OperatorModel make_direct_sum(std::vector<OperatorModel> blocks,
                                     numrange::ConvexRegion we) {
  if (blocks.empty()) fail(Error::Kind::config, "direct_sum: no blocks");
  const index_t k = static_cast<index_t>(blocks.size());
  index_t b = 0;
  double norm = 0.0;
  for (const auto& blk : blocks) {
    b = std::max(b, blk.band_width);
    norm = std::max(norm, blk.norm_bound);
  }
  OperatorModel m;
  m.kind = "direct_sum";
  m.band_width = k * b;
  m.norm_bound = norm;
  m.we_region = we;
  auto parts = std::make_shared<std::vector<OperatorModel>>(std::move(blocks));
  m.entry = [parts, k](index_t j, index_t n) {
    if (j % k != n % k) return cx{0, 0};
    return (*parts)[static_cast<std::size_t>(j % k)].entry_at(j / k, n / k);
  };
  return m;
}

}  // namespace opforge::seqspace
