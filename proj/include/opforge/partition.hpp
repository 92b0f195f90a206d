// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/region.hpp"

namespace opforge::forge {

// ---- weight sparsification -------------------------------------------------

struct SparsifiedWeights {
  std::vector<double> a_prime;        // same length as the input prefix
  std::vector<int> block_index;       // 1-based block containing each position
  int completed_blocks = 0;           // blocks whose weight target was reached
  std::size_t completed_prefix = 0;   // positions covered by completed blocks
};

/// Block construction: n_k is minimal with sum_{n_{k-1}+1}^{n_k} a_n >= k,
/// and on block k each weight becomes min(1, a_n / k). Every completed
/// block's sparsified sum is >= 1 and a'_n <= max(1, a_n) (in fact
/// <= min(1, a_n)). Positions past the last completed block are marked by
/// completed_prefix and still carry the running block's values.
inline SparsifiedWeights sparsify_weights(const std::vector<double>& a) {
  SparsifiedWeights out;
  out.a_prime.reserve(a.size());
  out.block_index.reserve(a.size());
  int k = 1;
  double block_sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0) fail(Error::Kind::precondition, "sparsify_weights: weights must be positive");
    out.a_prime.push_back(std::min(1.0, a[i] / k));
    out.block_index.push_back(k);
    block_sum += a[i];
    if (block_sum >= static_cast<double>(k)) {
      out.completed_blocks = k;
      out.completed_prefix = i + 1;
      ++k;
      block_sum = 0.0;
    }
  }
  return out;
}

// ---- residue classes (band construction) -----------------------------------

/// Picks r in {0..K} maximizing the finite-horizon sum of boundary distances
/// over B_r = {n : n = r mod (K+1)}, n running from 1. Ties break to the
/// smallest r.
inline int select_residue_class(const std::vector<cx>& lambdas,
                                const numrange::ConvexRegion& region, int K) {
  if (lambdas.empty()) fail(Error::Kind::precondition, "select_residue_class: empty prefix");
  if (K < 0) fail(Error::Kind::precondition, "select_residue_class: K must be >= 0");
  std::vector<double> sums(static_cast<std::size_t>(K) + 1, 0.0);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    index_t n = static_cast<index_t>(i) + 1;
    sums[static_cast<std::size_t>(n % (K + 1))] += region.dist_to_boundary(lambdas[i]);
  }
  int best = 0;
  for (int r = 1; r <= K; ++r)
    if (sums[static_cast<std::size_t>(r)] > sums[static_cast<std::size_t>(best)] + 1e-15) best = r;
  return best;
}

// ---- greedy block partition into seed classes -------------------------------

/// Round-robin seed schedule over blocks: rounds of sizes 1, 2, 3, ...
/// activate one more seed each, so block 1 -> 1 | 2 -> 1, 3 -> 2 |
/// 4 -> 1, 5 -> 2, 6 -> 3 | ... Every seed receives infinitely many blocks.
inline int round_robin_seed(int block) {
  int round = 1;
  long long cum = 0;
  while (cum + round < block) {
    cum += round;
    ++round;
  }
  return block - static_cast<int>(cum);
}

struct GreedyPartition {
  std::vector<int> block_of;   // 1-based block per position
  std::vector<int> seed_of;    // 1-based seed label per position
  int completed_blocks = 0;    // trailing positions may sit in an unfinished block
  int max_seed = 0;
};

/// Partitions positions into consecutive blocks of weight >= block_target
/// (the finite-horizon stand-in for the divergent-sum split of the index
/// set) and assigns blocks to seeds round-robin. An unfinished tail block is
/// assigned like the next block would be.
inline GreedyPartition greedy_block_partition(const std::vector<double>& weights,
                                              double block_target = 1.0) {
  GreedyPartition out;
  out.block_of.reserve(weights.size());
  out.seed_of.reserve(weights.size());
  int block = 1;
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0) fail(Error::Kind::precondition, "greedy_block_partition: negative weight");
    int seed = round_robin_seed(block);
    out.block_of.push_back(block);
    out.seed_of.push_back(seed);
    out.max_seed = std::max(out.max_seed, seed);
    sum += w;
    if (sum >= block_target - 1e-12) {
      out.completed_blocks = block;
      ++block;
      sum = 0.0;
    }
  }
  return out;
}

// ---- dyadic splitting (large-entries construction) --------------------------

/// m(n) with n = 2^{m(n)} (2k - 1): the 2-adic valuation of n >= 1.
inline int dyadic_level(index_t n) {
  if (n < 1) fail(Error::Kind::precondition, "dyadic_level: n must be >= 1");
  int m = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++m;
  }
  return m;
}

}  // namespace opforge::forge
