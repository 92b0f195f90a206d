// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/finvec.hpp"
#include "opforge/ortho.hpp"

namespace opforge::forge {

// Per-step audit trail: every quantity the re-verification checks, for the
// step kinds that produce it. Optional fields are serialized only when engaged, in a
// fixed key order, so identical runs yield identical streams.
struct StepRecord {
  int n = 0;
  std::string kind;  // band | band_off | band_direct | tridiag | small | large

  std::optional<int> seed_m;             // m(n)
  std::optional<cx> lambda;              // prescribed diagonal target
  std::optional<bool> seed_in_span;      // degenerate branch taken

  // band
  std::optional<double> rho, delta;
  std::optional<cx> mu;                  // reflected target for v_n
  std::optional<double> resid_before_sq, resid_after_sq, decrement_factor;

  // small entries
  std::optional<double> a_n, a_prime_n, c_n;
  std::optional<index_t> d_n;            // -1 when beyond the tabulated prefix

  // tridiagonal
  std::optional<double> z_norm, b_norm;
  std::optional<cx> lambda_prime;
  std::optional<double> scale_s;         // sqrt(1 - |z_n + b_n|^2)

  // large entries: plank certificate |<target, z_n>| vs required a_j * |target|
  std::vector<double> plank_lhs, plank_rhs;

  std::optional<index_t> window_start, window_length;
};

struct BuildState {
  std::string construction;
  seqspace::OrthoFamily us{1e-10};
  std::vector<int> seed_labels;            // label of seeds[i]
  std::vector<seqspace::FinVec> seeds;     // the y_m actually used
  std::vector<StepRecord> steps;
  std::map<std::string, double> constants;  // derived constants (a, c1, c2, d, ...)

  const seqspace::FinVec* seed_by_label(int label) const {
    for (std::size_t i = 0; i < seed_labels.size(); ++i)
      if (seed_labels[i] == label) return &seeds[i];
    return nullptr;
  }

  int ensure_seed(int label, index_t basis_index,
                  const std::function<seqspace::FinVec(int)>& seed_fn = {}) {
    for (std::size_t i = 0; i < seed_labels.size(); ++i)
      if (seed_labels[i] == label) return static_cast<int>(i);
    seed_labels.push_back(label);
    seeds.push_back(seed_fn ? seed_fn(label) : seqspace::FinVec::basis(basis_index));
    return static_cast<int>(seeds.size()) - 1;
  }
};

}  // namespace opforge::forge
