// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/operator_model.hpp"
#include "opforge/ortho.hpp"
#include "opforge/records.hpp"

namespace opforge::verify {

using seqspace::FinVec;
using seqspace::OperatorModel;
using seqspace::OrthoFamily;
using seqspace::inner_product;

struct CheckResult {
  std::string name;
  double tolerance = 0.0;
  double worst = 0.0;
  int at_n = 0, at_j = 0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool pass = true;

  void add(CheckResult r) {
    pass = pass && r.pass;
    checks.push_back(std::move(r));
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline int thread_budget() {
  if (const char* env = std::getenv("FORGE_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

namespace detail {

struct Violation {
  double value = -1.0;
  int n = 0, j = 0;

  /// Deterministic reduction: max by value, ties to lexicographic (n, j).
  void merge(double v, int n_, int j_) {
    if (v > value || (v == value && (n_ < n || (n_ == n && j_ < j)))) {
      value = v;
      n = n_;
      j = j_;
    }
  }
  void merge(const Violation& o) { merge(o.value, o.n, o.j); }
};

/// Runs fn(lo, hi, slot) over [0, n) chunks, FORGE_THREADS-capped, and
/// merges slot violations in fixed order.
inline Violation parallel_scan(int n, const std::function<void(int, int, Violation&)>& fn) {
  const int workers = std::max(1, std::min(thread_budget(), n));
  std::vector<Violation> slots(static_cast<std::size_t>(workers));
  if (workers == 1) {
    fn(0, n, slots[0]);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      int lo = w * chunk, hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi, w] { fn(lo, hi, slots[static_cast<std::size_t>(w)]); });
    }
    for (auto& t : pool) t.join();
  }
  Violation out;
  for (const auto& s : slots) out.merge(s);
  return out;
}

}  // namespace detail

/// max |<u_i, u_j> - delta_ij| over all pairs.
inline CheckResult check_orthonormality(const OrthoFamily& us, double tol,
                                        const std::string& name = "orthonormality") {
  const int n = static_cast<int>(us.size());
  auto v = detail::parallel_scan(n, [&](int lo, int hi, detail::Violation& slot) {
    for (int i = lo; i < hi; ++i)
      for (int j = i; j < n; ++j) {
        cx g = inner_product(us[static_cast<std::size_t>(i)], us[static_cast<std::size_t>(j)]);
        double d = std::abs(g - (i == j ? cx{1, 0} : cx{0, 0}));
        slot.merge(d, i + 1, j + 1);
      }
  });
  return {name, tol, std::max(v.value, 0.0), v.n, v.j, v.value <= tol};
}

/// Unit norms at a much tighter tolerance than the Gram check; this is what
/// makes single-coefficient tampering visible.
inline CheckResult check_unit_norms(const OrthoFamily& us, double tol = 1e-12) {
  detail::Violation v;
  for (std::size_t i = 0; i < us.size(); ++i)
    v.merge(std::abs(us[i].norm() - 1.0), static_cast<int>(i) + 1, static_cast<int>(i) + 1);
  return {"unit_norms", tol, std::max(v.value, 0.0), v.n, v.j, v.value <= tol};
}

struct EntryTarget {
  int n = 0, j = 0;  // 1-based: asserts <T u_n, u_j> == value
  cx value{0, 0};
};

inline CheckResult check_prescribed_entries(const OperatorModel& T, const OrthoFamily& us,
                                            const std::vector<EntryTarget>& targets, double tol,
                                            const std::string& name) {
  // group targets by column so T u_n is applied once
  std::vector<std::vector<const EntryTarget*>> by_col(us.size() + 1);
  for (const auto& t : targets) {
    if (t.n < 1 || t.j < 1 || t.n > static_cast<int>(us.size()) ||
        t.j > static_cast<int>(us.size()))
      fail(Error::Kind::verification, "check_prescribed_entries: target outside built prefix");
    by_col[static_cast<std::size_t>(t.n)].push_back(&t);
  }
  auto v = detail::parallel_scan(
      static_cast<int>(us.size()), [&](int lo, int hi, detail::Violation& slot) {
        for (int n = lo + 1; n <= hi; ++n) {
          if (by_col[static_cast<std::size_t>(n)].empty()) continue;
          FinVec Tu = T.apply(us[static_cast<std::size_t>(n - 1)]);
          for (const auto* t : by_col[static_cast<std::size_t>(n)])
            slot.merge(std::abs(inner_product(Tu, us[static_cast<std::size_t>(t->j - 1)]) - t->value),
                       t->n, t->j);
        }
      });
  return {name, tol, std::max(v.value, 0.0), v.n, v.j, v.value <= tol};
}

enum class BoundMode { upper, lower };

/// |<T u_n, u_j>| <= bound(n, j) + slack (upper) or >= bound(n, j) - slack
/// (lower) over all pairs with bound(n, j) finite; `include` filters pairs.
inline CheckResult check_entry_bounds(const OperatorModel& T, const OrthoFamily& us,
                                      const std::function<double(int, int)>& bound,
                                      BoundMode mode, double slack, const std::string& name,
                                      const std::function<bool(int, int)>& include = {}) {
  const int N = static_cast<int>(us.size());
  auto v = detail::parallel_scan(N, [&](int lo, int hi, detail::Violation& slot) {
    for (int n = lo + 1; n <= hi; ++n) {
      FinVec Tu = T.apply(us[static_cast<std::size_t>(n - 1)]);
      for (int j = 1; j <= N; ++j) {
        if (include && !include(n, j)) continue;
        double b = bound(n, j);
        if (!std::isfinite(b)) continue;
        double e = std::abs(inner_product(Tu, us[static_cast<std::size_t>(j - 1)]));
        double viol = mode == BoundMode::upper ? e - b : b - e;
        slot.merge(viol, n, j);
      }
    }
  });
  return {name, slack, std::max(v.value, 0.0), v.n, v.j, v.value <= slack};
}

/// Replays seed residual norms against the recorded per-step decrement
/// factors: at each recorded step, |(I-P_n) y|^2 must equal the previous
/// residual times the factor (relative tolerance), recomputed from the basis
/// alone.
inline CheckResult check_decay_ledger(const forge::BuildState& state, double rel_tol,
                                      const std::string& name = "decay_ledger") {
  detail::Violation v;
  std::map<int, double> resid;  // label -> |(I-P_n) y|^2, replayed
  for (std::size_t i = 0; i < state.seed_labels.size(); ++i)
    resid[state.seed_labels[i]] = state.seeds[i].norm_sq();
  std::size_t step_idx = 0;
  for (int n = 1; n <= static_cast<int>(state.us.size()); ++n, ++step_idx) {
    const auto& rec = state.steps[step_idx];
    std::map<int, double> before = resid;
    for (auto& [label, r] : resid) {
      const FinVec* y = state.seed_by_label(label);
      r -= std::norm(inner_product(*y, state.us[static_cast<std::size_t>(n - 1)]));
    }
    if (rec.decrement_factor && rec.seed_m && rec.resid_before_sq) {
      const double expect_before = *rec.resid_before_sq;
      const double got_before = before[*rec.seed_m];
      const double expect_after = expect_before * (*rec.decrement_factor);
      const double got_after = resid[*rec.seed_m];
      double err = std::abs(got_before - expect_before) / std::max(1e-300, expect_before);
      err = std::max(err, std::abs(got_after - expect_after) /
                              std::max({1e-300, std::abs(expect_after), 1e-9 * expect_before}));
      v.merge(err, n, *rec.seed_m);
    }
  }
  return {name, rel_tol, std::max(v.value, 0.0), v.n, v.j, v.value <= rel_tol};
}

/// Monotone seed decay: residual norms never increase step over step.
inline CheckResult check_seed_monotonicity(const forge::BuildState& state,
                                           double slack = 1e-12) {
  detail::Violation v;
  std::map<int, double> resid;
  for (std::size_t i = 0; i < state.seed_labels.size(); ++i)
    resid[state.seed_labels[i]] = state.seeds[i].norm_sq();
  for (int n = 1; n <= static_cast<int>(state.us.size()); ++n) {
    for (auto& [label, r] : resid) {
      double drop = std::norm(inner_product(*state.seed_by_label(label),
                                            state.us[static_cast<std::size_t>(n - 1)]));
      double next = r - drop;
      v.merge(next - r, n, label);  // positive would mean an increase
      r = next;
    }
  }
  return {"seed_monotone", slack, std::max(v.value, 0.0), v.n, v.j, v.value <= slack};
}

}  // namespace opforge::verify
