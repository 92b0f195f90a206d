// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include "opforge/operator_model.hpp"
#include "opforge/ortho.hpp"
#include "opforge/rng.hpp"
#include "oracles.hpp"

using namespace opforge;
using namespace opforge::seqspace;

namespace {

FinVec e(index_t k) { return FinVec::basis(k); }

std::vector<OperatorModel> sample_models() {
  std::vector<OperatorModel> models;
  models.push_back(make_shift());
  models.push_back(make_weighted_shift([](index_t) { return 0.5; }, 0.5,
                                       numrange::ConvexRegion::disk({0, 0}, 0.5)));
  models.push_back(make_diagonal([](index_t n) { return cx{1.0 / std::max<index_t>(n, 1), 0}; },
                                 1.0, numrange::ConvexRegion::point({0, 0})));
  models.push_back(make_toeplitz_banded({{-1, cx{0.5, 0}}, {1, cx{0.5, 0}}},
                                        numrange::ConvexRegion::segment({-1, 0}, {1, 0})));
  models.push_back(make_affine(make_shift(), cx{0.5, 0.25}, cx{0.1, -0.2}));
  models.push_back(make_direct_sum({make_shift(), make_shift()},
                                   numrange::ConvexRegion::disk({0, 0}, 1.0)));
  return models;
}

}  // namespace

TEST_CASE("inner product basics") {
  CHECK(inner_product(e(1), e(1)) == cx{1, 0});
  CHECK(inner_product(e(1), e(2)) == cx{0, 0});
  // single overlapping index: u(2) = i, v(2) = 1
  FinVec u = e(1);
  u.add(2, cx{0, 1});
  CHECK(inner_product(u, e(2)) == cx{0, 1});
  // conjugate-linear in the second argument
  FinVec v = e(3).scaled(cx{0, 2});
  CHECK(inner_product(e(3), v) == cx{0, -2});
}

TEST_CASE("FinVec pruning and support") {
  FinVec v;
  v.set(5, cx{1e-16, 0});
  CHECK(v.is_zero());
  v.set(5, cx{0.5, 0});
  v.add(5, cx{-0.5, 0});
  CHECK(v.is_zero());
  v.set(3, cx{1, 0});
  v.set(9, cx{2, 0});
  CHECK(v.min_index() == 3);
  CHECK(v.max_index() == 9);
  CHECK(v.norm_sq() == Approx(5.0));
}

TEST_CASE("residual examples") {
  OrthoFamily fam;
  fam.push_back(e(1));
  CHECK(residual(e(1), fam).norm() == Approx(0.0).margin(1e-14));
  CHECK(residual(e(2), fam) == e(2));
  FinVec u = e(1);
  u.add_scaled(e(2), cx{1, 0});
  FinVec r = residual(u, fam);
  CHECK((r.at(2) == cx{1, 0} && std::abs(r.at(1)) < 1e-14));
}

TEST_CASE("residual properties") {
  Rng rng(11);
  OrthoFamily fam;
  // small random orthonormal family via Gram-Schmidt
  for (int i = 0; i < 4; ++i) {
    FinVec v = oracles::random_finvec(rng, 30, 8);
    v = residual(v, fam);
    v.normalize();
    fam.push_back(std::move(v));
  }
  for (int t = 0; t < 25; ++t) {
    FinVec u = oracles::random_finvec(rng, 30, 10);
    FinVec r = residual(u, fam);
    FinVec rr = residual(r, fam);
    FinVec diff = rr;
    diff.add_scaled(r, cx{-1, 0});
    CHECK(diff.norm() <= 1e-12);                    // idempotence
    CHECK(r.norm() <= u.norm() + 1e-12);            // contraction
    for (std::size_t j = 0; j < fam.size(); ++j)
      CHECK(std::abs(inner_product(r, fam[j])) <= 1e-12);
  }
}

TEST_CASE("matrix entries of standard models") {
  OperatorModel S = make_shift();
  CHECK(matrix_entry(S, e(1), e(2)) == cx{1, 0});
  CHECK(matrix_entry(S, e(1), e(1)) == cx{0, 0});
  OperatorModel D = make_diagonal([](index_t n) { return cx{1.0 / std::max<index_t>(n, 1), 0}; },
                                  1.0, numrange::ConvexRegion::point({0, 0}));
  CHECK(matrix_entry(D, e(3), e(3)).real() == Approx(1.0 / 3));
}

TEST_CASE("apply and adjoint examples") {
  OperatorModel S = make_shift();
  CHECK(S.apply(e(1)) == e(2));
  CHECK(S.apply_adjoint(e(1)).is_zero());
  CHECK(S.apply_adjoint(S.apply(e(5))) == e(5));
  OperatorModel W = make_weighted_shift([](index_t) { return 0.5; }, 0.5,
                                        numrange::ConvexRegion::disk({0, 0}, 0.5));
  FinVec w = W.apply(e(3));
  CHECK(w.at(4) == cx{0.5, 0});
  CHECK(w.support_size() == 1);
}

TEST_CASE("adjointness over 100 random pairs per model") {
  Rng rng(42);
  for (const auto& T : sample_models()) {
    for (int t = 0; t < 100; ++t) {
      FinVec x = oracles::random_finvec(rng, 60, 8);
      FinVec y = oracles::random_finvec(rng, 60, 8);
      cx lhs = inner_product(T.apply(x), y);
      cx rhs = inner_product(x, T.apply_adjoint(y));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + x.norm() * y.norm()));
    }
  }
}

TEST_CASE("band discipline") {
  Rng rng(7);
  for (const auto& T : sample_models()) {
    for (int t = 0; t < 20; ++t) {
      FinVec x = oracles::random_finvec(rng, 50, 6);
      if (x.is_zero()) continue;
      FinVec y = T.apply(x);
      if (y.is_zero()) continue;
      CHECK(y.min_index() >= x.min_index() - T.band_width);
      CHECK(y.max_index() <= x.max_index() + T.band_width);
    }
  }
}

TEST_CASE("band sampling matches entry oracle zero pattern") {
  for (const auto& T : sample_models()) {
    for (index_t j = 0; j < 12; ++j)
      for (index_t n = 0; n < 12; ++n)
        if (std::abs(j - n) > T.band_width) CHECK(T.entry_at(j, n) == cx{0, 0});
  }
}

TEST_CASE("norm bound holds on samples") {
  Rng rng(13);
  for (const auto& T : sample_models()) {
    for (int t = 0; t < 20; ++t) {
      FinVec x = oracles::random_finvec(rng, 40, 7);
      CHECK(T.apply(x).norm() <= T.norm_bound * x.norm() + 1e-9);
    }
  }
}

TEST_CASE("OrthoFamily gram measurement") {
  OrthoFamily fam;
  fam.push_back(e(1));
  fam.push_back(e(4));
  CHECK(fam.worst_gram_error() == Approx(0.0).margin(1e-15));
  fam.push_back(e(1));  // deliberate duplicate
  CHECK(fam.worst_gram_error() == Approx(1.0));
}
