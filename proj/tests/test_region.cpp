// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include "opforge/region.hpp"

using namespace opforge;
using numrange::ConvexRegion;

TEST_CASE("disk boundary distance") {
  auto d = ConvexRegion::disk({0, 0}, 1.0);
  CHECK(d.dist_to_boundary({0.5, 0}) == Approx(0.5));
  CHECK(d.dist_to_boundary({0, 0}) == Approx(1.0));
  CHECK(d.dist_to_boundary({1, 0}) == Approx(0.0));
  CHECK(d.dist_to_boundary({2, 0}) == 0.0);  // clamped outside
  CHECK(d.diameter() == Approx(2.0));
}

TEST_CASE("square polygon boundary distance") {
  auto sq = ConvexRegion::polygon({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
  REQUIRE(sq.kind() == ConvexRegion::Kind::polygon);
  CHECK(sq.dist_to_boundary({0, 0}) == Approx(1.0));
  CHECK(sq.dist_to_boundary({0.5, 0}) == Approx(0.5));
  CHECK(sq.dist_to_boundary({1, 1}) == Approx(0.0).margin(1e-15));
  CHECK(sq.dist_to_boundary({3, 0}) == 0.0);
  CHECK(sq.diameter() == Approx(2 * std::sqrt(2.0)));
}

TEST_CASE("polygon degenerates to segment and point") {
  auto seg = ConvexRegion::polygon({{0, 0}, {0.5, 0}, {1, 0}});
  REQUIRE(seg.kind() == ConvexRegion::Kind::segment);
  CHECK(seg.dist_to_boundary({0.5, 0}) == 0.0);        // empty interior
  CHECK(seg.dist_to_set({0.5, 0.25}) == Approx(0.25));
  CHECK(seg.contains_with_margin({0.5, 0}, 0.4));
  CHECK_FALSE(seg.contains_with_margin({0.95, 0}, 0.4));

  auto pt = ConvexRegion::polygon({{2, 3}, {2, 3}});
  REQUIRE(pt.kind() == ConvexRegion::Kind::point);
  CHECK(pt.dist_to_set({2, 3}) == 0.0);
  CHECK(pt.diameter() == 0.0);
}

TEST_CASE("diameter pair tie-breaks") {
  auto d = ConvexRegion::disk({0, 0}, 1.0);
  auto [lam, nu] = d.diameter_pair();
  CHECK(lam == cx{1, 0});  // maximize |lambda|, then smallest argument
  CHECK(nu == cx{-1, 0});

  auto seg = ConvexRegion::segment({-2, 0}, {1, 0});
  auto [a, b] = seg.diameter_pair();
  CHECK(a == cx{-2, 0});  // larger modulus endpoint first
  CHECK(b == cx{1, 0});
}

TEST_CASE("affine image") {
  auto d = ConvexRegion::disk({1, 0}, 2.0).affine(cx{0, 1}, cx{0, 0});
  CHECK(d.disk_center() == cx{0, 1});
  CHECK(d.disk_radius() == Approx(2.0));
  auto sq = ConvexRegion::polygon({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}).affine(cx{2, 0}, cx{1, 0});
  CHECK(sq.dist_to_boundary({1, 0}) == Approx(2.0));
}

TEST_CASE("interior points are deep") {
  auto sq = ConvexRegion::polygon({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
  CHECK(sq.dist_to_boundary(sq.interior_point()) > 0.5);
  auto d = ConvexRegion::disk({3, -1}, 0.25);
  CHECK(d.interior_point() == cx{3, -1});
}
