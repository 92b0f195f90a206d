// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include "opforge/build_band.hpp"
#include "opforge/verify.hpp"

using namespace opforge;
using namespace opforge::forge;
using seqspace::FinVec;
using seqspace::inner_product;
using seqspace::make_shift;

namespace {

std::vector<cx> constant_lambdas(int len, cx v) { return std::vector<cx>(len, v); }

}  // namespace

TEST_CASE("reflected target solves the displayed proportion") {
  // lambda = 0, delta = 0.25, <Tb,b> = 0.5 (rho = 0.5) -> mu = -0.25
  CHECK(band_reflect(cx{0, 0}, 0.25, cx{0.5, 0}) == cx{-0.25, 0});
  // rho = 0 degenerates to lambda itself
  CHECK(band_reflect(cx{0.3, 0.1}, 0.2, cx{0.3, 0.1}) == cx{0.3, 0.1});
}

TEST_CASE("window corollary: zero window of width K") {
  auto S = make_shift();
  BandParams p;
  p.K = 2;
  p.N = 30;
  BuildState st = build_banded_diagonal(S, constant_lambdas(p.N + p.K + 2, {0, 0}), p);
  REQUIRE(static_cast<int>(st.us.size()) == p.N);

  for (int n = 1; n <= p.N; ++n) {
    FinVec Tu = S.apply(st.us[n - 1]);
    for (int j = std::max(1, n - p.K); j <= std::min(p.N, n + p.K); ++j)
      CHECK(std::abs(inner_product(Tu, st.us[j - 1])) <= 1e-9);
  }
  CHECK(st.us.worst_gram_error() <= 1e-10);
  CHECK(verify::check_decay_ledger(st, 1e-6).pass);
}

TEST_CASE("degenerate branches: rho = 0 and seed absorbed") {
  // K = 0 on the shift with lambda = 0: step 1 takes u_1 = e_1 (rho = 0),
  // step 2 finds the same seed fully absorbed and goes direct.
  auto S = make_shift();
  BandParams p;
  p.K = 0;
  p.N = 5;
  BuildState st = build_banded_diagonal(S, constant_lambdas(p.N + 2, {0, 0}), p);
  CHECK(st.steps[0].kind == "band");
  CHECK(*st.steps[0].rho == Approx(0.0).margin(1e-13));
  CHECK(st.us[0] == FinVec::basis(1));
  bool saw_direct = false;
  for (const auto& r : st.steps)
    if (r.kind == "band_direct") saw_direct = true;
  CHECK(saw_direct);
}

TEST_CASE("spiral diagonal with zero band, small prefix") {
  auto S = make_shift();
  BandParams p;
  p.K = 3;
  p.N = 24;
  std::vector<cx> lambdas;
  for (int n = 1; n <= p.N + p.K + 2; ++n)
    lambdas.push_back(std::polar(1.0 - 1.0 / (n + 1), 2 * 3.14159265358979324 * 0.3819 * n));
  BuildState st = build_banded_diagonal(S, lambdas, p);

  for (int n = 1; n <= p.N; ++n) {
    FinVec Tu = S.apply(st.us[n - 1]);
    CHECK(std::abs(inner_product(Tu, st.us[n - 1]) - lambdas[n - 1]) <= 1e-9);
    for (int j = std::max(1, n - p.K); j < n; ++j) {
      CHECK(std::abs(inner_product(Tu, st.us[j - 1])) <= 1e-9);
      CHECK(std::abs(inner_product(S.apply(st.us[j - 1]), st.us[n - 1])) <= 1e-9);
    }
  }
  CHECK(st.us.worst_gram_error() <= 1e-10);

  // decrement identity on every in-class mixing step
  for (const auto& r : st.steps)
    if (r.decrement_factor) {
      CHECK(*r.resid_after_sq ==
            Approx(*r.resid_before_sq * *r.decrement_factor).epsilon(1e-6));
      CHECK(*r.decrement_factor > 0.0);
      CHECK(*r.decrement_factor <= 1.0);
    }
}

TEST_CASE("custom orthonormal seed family") {
  auto S = make_shift();
  BandParams p;
  p.K = 1;
  p.N = 16;
  p.seed_fn = [](int m) { return FinVec::basis(2 * m); };  // even-index seeds
  BuildState st = build_banded_diagonal(S, constant_lambdas(p.N + 3, {0, 0}), p);
  CHECK(st.us.worst_gram_error() <= 1e-10);
  for (std::size_t i = 0; i < st.seeds.size(); ++i)
    CHECK(st.seeds[i] == FinVec::basis(2 * st.seed_labels[i]));
  CHECK(verify::check_decay_ledger(st, 1e-6).pass);
}

TEST_CASE("preconditions rejected at the offending step") {
  auto S = make_shift();
  BandParams p;
  p.K = 1;
  p.N = 4;
  // lambda_2 on the boundary
  std::vector<cx> bad = constant_lambdas(p.N + 3, {0, 0});
  bad[1] = cx{1, 0};
  CHECK_THROWS_AS(build_banded_diagonal(S, bad, p), Error);
}
