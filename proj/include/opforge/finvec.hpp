// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "opforge/common.hpp"

namespace opforge::seqspace {

// Finitely supported complex coefficient sequence over the standard basis of
// l2(N). Entries are kept in a flat vector sorted by index: co-iterated inner
// products and merges stay cache-friendly even with supports in the tens of
// thousands, and iteration order is deterministic. Coefficients below
// kPruneEps are never stored.
class FinVec {
public:
  using entry_type = std::pair<index_t, cx>;
  using const_iterator = std::vector<entry_type>::const_iterator;

  FinVec() = default;

  static FinVec basis(index_t k) {
    FinVec v;
    v.entries_.emplace_back(k, cx{1.0, 0.0});
    return v;
  }

  /// Entries must be sorted by strictly increasing index.
  static FinVec from_sorted(std::vector<entry_type> entries) {
    FinVec v;
    v.entries_ = std::move(entries);
    v.prune();
    return v;
  }

  bool is_zero() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  /// Smallest / largest index carrying a coefficient; -1 on the zero vector.
  index_t min_index() const { return entries_.empty() ? -1 : entries_.front().first; }
  index_t max_index() const { return entries_.empty() ? -1 : entries_.back().first; }

  cx at(index_t k) const {
    auto it = lower_bound(k);
    return (it != entries_.end() && it->first == k) ? it->second : cx{0.0, 0.0};
  }

  void set(index_t k, cx value) {
    auto it = lower_bound(k);
    const bool present = it != entries_.end() && it->first == k;
    if (std::abs(value) < kPruneEps) {
      if (present) entries_.erase(it);
    } else if (present) {
      it->second = value;
    } else {
      entries_.insert(it, {k, value});
    }
  }

  void add(index_t k, cx value) { set(k, at(k) + value); }

  /// this += alpha * other via a sorted merge.
  FinVec& add_scaled(const FinVec& other, cx alpha) {
    if (alpha == cx{0.0, 0.0} || other.entries_.empty()) return *this;
    std::vector<entry_type> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.cbegin(), ae = entries_.cend();
    auto b = other.entries_.cbegin(), be = other.entries_.cend();
    while (a != ae || b != be) {
      if (b == be || (a != ae && a->first < b->first)) {
        merged.push_back(*a++);
      } else if (a == ae || b->first < a->first) {
        cx v = alpha * b->second;
        if (std::abs(v) >= kPruneEps) merged.emplace_back(b->first, v);
        ++b;
      } else {
        cx v = a->second + alpha * b->second;
        if (std::abs(v) >= kPruneEps) merged.emplace_back(a->first, v);
        ++a;
        ++b;
      }
    }
    entries_ = std::move(merged);
    return *this;
  }

  FinVec& operator*=(cx alpha) {
    if (alpha == cx{0.0, 0.0}) {
      entries_.clear();
      return *this;
    }
    for (auto& [k, c] : entries_) c *= alpha;
    prune();
    return *this;
  }

  FinVec scaled(cx alpha) const {
    FinVec v = *this;
    v *= alpha;
    return v;
  }

  double norm_sq() const {
    KahanSum s;
    for (const auto& [k, c] : entries_) s.add(std::norm(c));
    return s.value();
  }
  double norm() const { return std::sqrt(norm_sq()); }

  /// Scales to unit norm. Throws on (numerically) zero input.
  FinVec& normalize() {
    double n = norm();
    if (n < 1e-14) fail(Error::Kind::construction, "FinVec::normalize: zero vector");
    *this *= cx{1.0 / n, 0.0};
    return *this;
  }

  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  const std::vector<entry_type>& items() const { return entries_; }

  bool operator==(const FinVec& other) const { return entries_ == other.entries_; }

private:
  std::vector<entry_type>::iterator lower_bound(index_t k) {
    return std::lower_bound(entries_.begin(), entries_.end(), k,
                            [](const entry_type& e, index_t key) { return e.first < key; });
  }
  std::vector<entry_type>::const_iterator lower_bound(index_t k) const {
    return std::lower_bound(entries_.begin(), entries_.end(), k,
                            [](const entry_type& e, index_t key) { return e.first < key; });
  }
  void prune() {
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [](const entry_type& e) { return std::abs(e.second) < kPruneEps; }),
                   entries_.end());
  }

  std::vector<entry_type> entries_;
};

/// <u, v> = sum_k u(k) * conj(v(k)); linear in the first argument,
/// conjugate-linear in the second.
inline cx inner_product(const FinVec& u, const FinVec& v) {
  KahanSumCx s;
  auto iu = u.begin(), eu = u.end();
  auto iv = v.begin(), ev = v.end();
  while (iu != eu && iv != ev) {
    if (iu->first < iv->first)
      ++iu;
    else if (iv->first < iu->first)
      ++iv;
    else {
      s.add(iu->second * std::conj(iv->second));
      ++iu;
      ++iv;
    }
  }
  return s.value();
}

inline FinVec lin_comb(std::initializer_list<std::pair<cx, const FinVec*>> terms) {
  FinVec out;
  for (const auto& [alpha, v] : terms) out.add_scaled(*v, alpha);
  return out;
}

}  // namespace opforge::seqspace
