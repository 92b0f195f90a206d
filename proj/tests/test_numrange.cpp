// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include "opforge/numrange.hpp"
#include "opforge/operator_model.hpp"
#include "oracles.hpp"

using namespace opforge;
using namespace opforge::numrange;

namespace {

Matrix jordan(int k) {
  Matrix J(k, k);
  J.setZero();
  for (int i = 0; i + 1 < k; ++i) J(i + 1, i) = 1;
  return J;
}

double sweep_radius(const BoundarySweep& sweep) {
  double r = 0;
  for (const auto& p : sweep.points) r = std::max(r, std::abs(p.value));
  return r;
}

}  // namespace

TEST_CASE("normal matrix range degenerates to the eigenvalue segment") {
  Matrix M(2, 2);
  M.setZero();
  M(1, 1) = cx{1, 0};
  auto hull = numerical_range_boundary(M, 16, {16, false, 0}).hull();
  REQUIRE(hull.kind() == ConvexRegion::Kind::segment);
  auto v = hull.vertices();
  CHECK(std::abs(v[0] - cx{0, 0}) + std::abs(v[1] - cx{1, 0}) < 1e-12);
}

TEST_CASE("Jordan block ranges are disks of known radius") {
  Rng rng(5);
  // 2x2: radius 1/2, sampling oracle converges to ~1e-8 here
  auto s2 = numerical_range_boundary(jordan(2), 64, {64, false, 0});
  double oracle2 = oracles::sample_numerical_radius(jordan(2), 200000, rng);
  CHECK(std::abs(sweep_radius(s2) - 0.5) < 1e-8);
  CHECK(std::abs(sweep_radius(s2) - oracle2) < 1e-7);

  // 5x5: radius cos(pi/6)
  auto s5 = numerical_range_boundary(jordan(5), 64, {64, false, 0});
  double oracle5 = oracles::sample_numerical_radius(jordan(5), 20000, rng);
  CHECK(std::abs(sweep_radius(s5) - std::cos(3.14159265358979324 / 6)) < 1e-6);
  CHECK(std::abs(sweep_radius(s5) - oracle5) < 1e-6);
}

TEST_CASE("inscribed polygon property: vertices re-evaluate") {
  Rng rng(9);
  Matrix M = oracles::random_matrix(7, rng);
  auto sweep = numerical_range_boundary(M, 32, {32, false, 0});
  for (const auto& p : sweep.points) {
    CHECK(std::abs(p.state.norm() - 1.0) < 1e-12);
    CHECK(std::abs(rayleigh(M, p.state) - p.value) < 1e-10);
  }
}

TEST_CASE("monotone refinement: doubling angles only adds vertices") {
  Rng rng(17);
  Matrix M = oracles::random_matrix(6, rng);
  auto coarse = numerical_range_boundary(M, 16, {16, false, 0});
  auto fine = numerical_range_boundary(M, 32, {32, false, 0});
  for (const auto& p : coarse.points) {
    double best = 1e9;
    for (const auto& q : fine.points) best = std::min(best, std::abs(p.value - q.value));
    CHECK(best < 1e-10);
  }
}

TEST_CASE("find_state_with_value on diag(0,1)") {
  Matrix M(2, 2);
  M.setZero();
  M(1, 1) = cx{1, 0};
  Vector x = find_state_with_value(M, cx{0.5, 0}, 0.05);
  CHECK(std::abs(rayleigh(M, x) - cx{0.5, 0}) < 1e-11);
  CHECK(std::abs(std::abs(x(0)) - 1.0 / std::sqrt(2.0)) < 1e-6);
  CHECK(std::abs(std::abs(x(1)) - 1.0 / std::sqrt(2.0)) < 1e-6);

  Vector y = find_state_with_value(M, cx{0, 0}, 0.05);
  CHECK(std::abs(rayleigh(M, y)) < 1e-11);
}

TEST_CASE("find_state_with_value at the polygon centroid of a random matrix") {
  Rng rng(23);
  Matrix M = oracles::random_matrix(8, rng);
  auto sweep = numerical_range_boundary(M, 64, {64, false, 0});
  ConvexRegion hull = sweep.hull();
  cx centroid = hull.interior_point();
  Vector x = find_state_with_value(M, centroid, hull.dist_to_boundary(centroid) / 2);
  CHECK(std::abs(x.norm() - 1.0) < 1e-12);
  CHECK(std::abs(rayleigh(M, x) - centroid) < 1e-11);
}

TEST_CASE("find_state_with_value random suite") {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    Matrix M = oracles::random_matrix(8, rng);
    auto sweep = numerical_range_boundary(M, 48, {48, false, 0});
    ConvexRegion hull = sweep.hull();
    if (hull.kind() != ConvexRegion::Kind::polygon) continue;
    cx c = hull.interior_point();
    // sample inside the polygon shrunk by 10%
    const auto& vs = hull.vertices();
    cx p{0, 0};
    double wsum = 0;
    for (const auto& v : vs) {
      double w = -std::log(std::max(rng.uniform(), 1e-12));
      p += w * v;
      wsum += w;
    }
    p /= wsum;
    cx lambda = c + 0.9 * (p - c);
    double margin = hull.dist_to_boundary(lambda);
    if (margin <= 1e-6) continue;
    Vector x = find_state_with_value(M, lambda, margin / 2);
    CHECK(std::abs(x.norm() - 1.0) < 1e-12);
    CHECK(std::abs(rayleigh(M, x) - lambda) < 1e-11);
  }
}

TEST_CASE("state_with_value rejects uncertified targets") {
  Matrix M = jordan(4);
  auto sweep = numerical_range_boundary(M, 32, {32, false, 0});
  CHECK_THROWS_AS(state_with_value(M, sweep, cx{0.95, 0}, 0.01), Error);
  CHECK_THROWS_AS(state_with_value(M, sweep, cx{0.1, 0}, -1.0), Error);
}

TEST_CASE("find_state_in_complement basics on the shift") {
  auto S = seqspace::make_shift();
  auto found = find_state_in_complement(S, {}, cx{0, 0}, 0.2, 1);
  cx got = seqspace::inner_product(S.apply(found.v), found.v);
  CHECK(std::abs(got) < 1e-11);
  CHECK(found.v.min_index() >= 1);
}

TEST_CASE("find_state_in_complement respects constraints exactly") {
  auto S = seqspace::make_shift();
  std::vector<seqspace::FinVec> cons;
  for (index_t k = 1; k <= 10; ++k) cons.push_back(seqspace::FinVec::basis(k));
  std::vector<const seqspace::FinVec*> ptrs;
  for (const auto& c : cons) ptrs.push_back(&c);

  auto found = find_state_in_complement(S, ptrs, cx{0.5, 0}, 0.4, 1);
  CHECK(found.v.min_index() >= 12);  // beyond max support + band + 1
  cx got = seqspace::inner_product(S.apply(found.v), found.v);
  CHECK(std::abs(got - cx{0.5, 0}) < 1e-11);
  seqspace::FinVec Sv = S.apply(found.v);
  seqspace::FinVec Ssv = S.apply_adjoint(found.v);
  for (const auto& c : cons) {
    CHECK(seqspace::inner_product(found.v, c) == cx{0, 0});
    CHECK(seqspace::inner_product(Sv, c) == cx{0, 0});
    CHECK(seqspace::inner_product(Ssv, c) == cx{0, 0});
  }
}

TEST_CASE("window growth near the boundary follows the compression radius") {
  auto S = seqspace::make_shift();
  // cos(pi/17) < 0.995: length 16 cannot certify |lambda| + margin = 0.995
  numrange::WindowPolicy policy{16, 1 << 12};
  auto found = find_state_in_complement(S, {}, cx{0.99, 0}, 0.005, 1, policy);
  CHECK(found.window_length >= 32);
  cx got = seqspace::inner_product(S.apply(found.v), found.v);
  CHECK(std::abs(got - cx{0.99, 0}) < 1e-11);

  // independent oracle: the smallest doubled window whose sweep hull
  // certifies the target
  index_t oracle_len = 0;
  for (index_t len : {16, 32, 64}) {
    CompressionWindow win{1, len, {}};
    auto hull = numerical_range_boundary(win.base_matrix(S), 64, {64, false, 0}).hull();
    if (hull.contains_with_margin(cx{0.99, 0}, 0.005)) {
      oracle_len = len;
      break;
    }
  }
  CHECK(oracle_len >= 32);
  CHECK(found.window_length <= std::max<index_t>(oracle_len, 32) * 2);
}

TEST_CASE("precondition failures are reported") {
  auto S = seqspace::make_shift();
  CHECK_THROWS_AS(find_state_in_complement(S, {}, cx{1.5, 0}, 0.1, 1), Error);
  CHECK_THROWS_AS(find_state_in_complement(S, {}, cx{0, 0}, 0.0, 1), Error);
}

TEST_CASE("we_region validation flags mis-specified regions") {
  auto S = seqspace::make_shift();
  CHECK(we_region_outward_defect(S, 100, 64) <= 1e-9);

  auto lying = S;
  lying.we_region = ConvexRegion::disk({0, 0}, 0.5);  // true range radius ~ cos(pi/65)
  CHECK(we_region_outward_defect(lying, 100, 64) > 0.4);

  auto W = seqspace::make_weighted_shift([](index_t) { return 0.5; }, 0.5,
                                         ConvexRegion::disk({0, 0}, 0.5));
  CHECK(we_region_outward_defect(W, 100, 64) <= 1e-9);
}

TEST_CASE("compression window with excluded directions shrinks") {
  auto S = seqspace::make_shift();
  CompressionWindow win{1, 4, {seqspace::FinVec::basis(2)}};
  Matrix M = win.matrix(S);
  CHECK(M.rows() == 3);
  CHECK(M.cols() == 3);
}
