// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include "opforge/lemmas.hpp"
#include "opforge/rng.hpp"
#include "oracles.hpp"

using namespace opforge;
using namespace opforge::forge;
using seqspace::FinVec;
using seqspace::inner_product;
using seqspace::make_shift;

TEST_CASE("lemma state reproduces pairings and satisfies the norm bound") {
  auto S = make_shift();
  const double eps = 0.2;
  Lemma2dState L = lemma2d_state(S, cx{0, 0}, eps, {});

  CHECK(std::abs(L.u.norm() - 1.0) < 1e-12);
  CHECK(std::abs(inner_product(S.apply(L.u), L.u)) < 1e-10);

  SECTION("alpha = beta = 0 gives z = 0") { CHECK(L.z_for({0, 0}, {0, 0}).is_zero()); }

  SECTION("biorthogonal reproduction at (1, 0)") {
    FinVec z = L.z_for({1, 0}, {0, 0});
    CHECK(std::abs(inner_product(L.w, z) - cx{1, 0}) < 1e-10);
    CHECK(std::abs(inner_product(L.w_prime, z)) < 1e-10);
  }

  SECTION("norm bound at (0.01, 0.01)") {
    FinVec z = L.z_for({0.01, 0}, {0.01, 0});
    CHECK(z.norm() <= 2 * (0.01 + 0.01) / eps + 1e-10);
  }

  SECTION("200 random pairs reproduce to 1e-10") {
    Rng rng(19);
    for (int t = 0; t < 200; ++t) {
      cx a = rng.normal_cx(), b = rng.normal_cx();
      FinVec z = L.z_for(a, b);
      CHECK(std::abs(inner_product(L.w, z) - a) < 1e-10);
      CHECK(std::abs(inner_product(L.w_prime, z) - b) < 1e-10);
      CHECK(z.norm() <= 2 * (std::abs(a) + std::abs(b)) / eps + 1e-10);
    }
  }
}

TEST_CASE("lemma state honors constraints exactly") {
  auto S = make_shift();
  std::vector<FinVec> cons;
  for (index_t k = 1; k <= 5; ++k) cons.push_back(FinVec::basis(k));
  std::vector<const FinVec*> ptrs;
  for (const auto& c : cons) ptrs.push_back(&c);
  Lemma2dState L = lemma2d_state(S, cx{0.1, -0.2}, 0.2, ptrs);
  for (const auto& c : cons) {
    CHECK(inner_product(L.u, c) == cx{0, 0});
    CHECK(inner_product(S.apply(L.u), c) == cx{0, 0});
    CHECK(inner_product(S.apply_adjoint(L.u), c) == cx{0, 0});
  }
  CHECK(std::abs(inner_product(S.apply(L.u), L.u) - cx{0.1, -0.2}) < 1e-10);
}

TEST_CASE("lemma preconditions") {
  auto S = make_shift();
  CHECK_THROWS_AS(lemma2d_state(S, cx{0.9, 0}, 0.2, {}), Error);  // dist <= eps
  CHECK_THROWS_AS(lemma2d_state(S, cx{0, 0}, -1.0, {}), Error);
}

TEST_CASE("pearcy admissible constants for the shift") {
  const double diam = 2.0;
  CHECK(diam / (4 * std::sqrt(2.0)) == Approx(0.35355339059));
  CHECK(diam / 4 == Approx(0.5));
  auto S = make_shift();
  CHECK_THROWS_AS(pearcy_state(S, {}, {0.36, 0.49, 0.0}), Error);  // C too large
  CHECK_THROWS_AS(pearcy_state(S, {}, {0.35, 0.51, 0.0}), Error);  // D too large
}

TEST_CASE("pearcy state meets all three bounds on the shift") {
  auto S = make_shift();
  std::vector<FinVec> cons;
  for (index_t k = 1; k <= 8; ++k) cons.push_back(FinVec::basis(k));
  std::vector<const FinVec*> ptrs;
  for (const auto& c : cons) ptrs.push_back(&c);

  FinVec u = pearcy_state(S, ptrs, {0.35, 0.49, 0.0});
  CHECK(std::abs(u.norm() - 1.0) < 1e-12);
  FinVec Tu = S.apply(u), Tsu = S.apply_adjoint(u);
  cx d = inner_product(Tu, u);
  FinVec w = Tu;
  w.add_scaled(u, -d);
  FinVec wp = Tsu;
  wp.add_scaled(u, -inner_product(Tsu, u));
  CHECK(std::abs(d) >= 0.49 - 1e-9);
  CHECK(w.norm() >= 0.35 - 1e-9);
  CHECK(wp.norm() >= 0.35 - 1e-9);
  for (const auto& c : cons) CHECK(inner_product(u, c) == cx{0, 0});
}

TEST_CASE("pearcy state on a selfadjoint model with segment region") {
  // symmetric banded Toeplitz with symbol cos(theta): W_e = [-1, 1]
  auto T = seqspace::make_toeplitz_banded({{-1, cx{0.5, 0}}, {1, cx{0.5, 0}}},
                                          numrange::ConvexRegion::segment({-1, 0}, {1, 0}));
  T.norm_bound = 1.0;
  FinVec u = pearcy_state(T, {}, {0.3, 0.4, 0.0});
  FinVec Tu = T.apply(u);
  CHECK(std::abs(inner_product(Tu, u)) >= 0.4 - 1e-9);
}

TEST_CASE("pearcy rejects point regions") {
  auto D = seqspace::make_diagonal([](index_t n) { return cx{1.0 / std::max<index_t>(n, 1), 0}; },
                                   1.0, numrange::ConvexRegion::point({0, 0}));
  CHECK_THROWS_AS(pearcy_state(D, {}, {0.1, 0.1, 0.0}), Error);
}
