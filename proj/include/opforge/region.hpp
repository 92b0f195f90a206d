// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "opforge/common.hpp"

namespace opforge::numrange {

namespace detail {

inline double cross2(cx a, cx b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Andrew monotone chain; returns counterclockwise hull without repeated
/// first vertex. Collinear inputs collapse to 2 (or 1) points.
inline std::vector<cx> convex_hull(std::vector<cx> pts) {
  std::sort(pts.begin(), pts.end(), [](cx a, cx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<cx> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double dist_point_segment(cx p, cx a, cx b) {
  cx ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

}  // namespace detail

// Compact convex subset of C: disk, convex polygon (CCW), segment, or point.
// Houses the essential numerical range of an operator model and the inscribed
// hulls produced by boundary sweeps.
class ConvexRegion {
public:
  enum class Kind { disk, polygon, segment, point };

  static ConvexRegion disk(cx center, double radius) {
    if (radius < 0) fail(Error::Kind::config, "ConvexRegion::disk: negative radius");
    ConvexRegion r;
    r.kind_ = Kind::disk;
    r.center_ = center;
    r.radius_ = radius;
    return r;
  }

  static ConvexRegion point(cx value) {
    ConvexRegion r;
    r.kind_ = Kind::point;
    r.verts_ = {value};
    return r;
  }

  static ConvexRegion segment(cx a, cx b) {
    if (a == b) return point(a);
    ConvexRegion r;
    r.kind_ = Kind::segment;
    r.verts_ = {a, b};
    return r;
  }

  /// Builds the hull of the given points and degrades the kind as needed
  /// (collinear -> segment, coincident -> point).
  static ConvexRegion polygon(const std::vector<cx>& points) {
    if (points.empty()) fail(Error::Kind::config, "ConvexRegion::polygon: no vertices");
    auto hull = detail::convex_hull(points);
    if (hull.size() == 1) return point(hull[0]);
    if (hull.size() == 2) return segment(hull[0], hull[1]);
    // Collapse numerically flat hulls to a segment along the diameter.
    double diam = 0;
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < hull.size(); ++i)
      for (std::size_t j = i + 1; j < hull.size(); ++j) {
        double d = std::abs(hull[i] - hull[j]);
        if (d > diam) diam = d, ia = i, ib = j;
      }
    double thick = 0;
    for (cx p : hull) thick = std::max(thick, detail::dist_point_segment(p, hull[ia], hull[ib]));
    if (thick <= 1e-12 * std::max(1.0, diam)) {
      if (diam <= 1e-14) return point(hull[ia]);
      return segment(hull[ia], hull[ib]);
    }
    ConvexRegion r;
    r.kind_ = Kind::polygon;
    r.verts_ = std::move(hull);
    return r;
  }

  Kind kind() const { return kind_; }
  cx disk_center() const { return center_; }
  double disk_radius() const { return radius_; }
  const std::vector<cx>& vertices() const { return verts_; }

  /// Max pairwise distance of extreme points (2*radius for a disk).
  double diameter() const {
    switch (kind_) {
      case Kind::disk: return 2.0 * radius_;
      case Kind::point: return 0.0;
      case Kind::segment: return std::abs(verts_[1] - verts_[0]);
      case Kind::polygon: {
        double d = 0;
        for (std::size_t i = 0; i < verts_.size(); ++i)
          for (std::size_t j = i + 1; j < verts_.size(); ++j)
            d = std::max(d, std::abs(verts_[i] - verts_[j]));
        return d;
      }
    }
    return 0.0;
  }

  /// Euclidean distance from lambda to the topological boundary, clamped to
  /// zero outside the closure, so "> 0" is exactly interior membership.
  double dist_to_boundary(cx lambda) const {
    switch (kind_) {
      case Kind::disk:
        return std::max(0.0, radius_ - std::abs(lambda - center_));
      case Kind::point:
      case Kind::segment:
        return 0.0;  // empty interior
      case Kind::polygon: {
        double d = std::numeric_limits<double>::infinity();
        const std::size_t n = verts_.size();
        for (std::size_t i = 0; i < n; ++i) {
          cx a = verts_[i], b = verts_[(i + 1) % n];
          cx e = b - a;
          double len = std::abs(e);
          if (len == 0) continue;
          // signed distance, positive on the interior side of a CCW edge
          double s = detail::cross2(e, lambda - a) / len;
          d = std::min(d, s);
        }
        return std::max(0.0, d);
      }
    }
    return 0.0;
  }

  /// Distance from lambda to the set itself (0 iff member of the closure).
  double dist_to_set(cx lambda) const {
    switch (kind_) {
      case Kind::disk:
        return std::max(0.0, std::abs(lambda - center_) - radius_);
      case Kind::point:
        return std::abs(lambda - verts_[0]);
      case Kind::segment:
        return detail::dist_point_segment(lambda, verts_[0], verts_[1]);
      case Kind::polygon: {
        if (dist_to_boundary(lambda) > 0) return 0.0;
        double d = std::numeric_limits<double>::infinity();
        const std::size_t n = verts_.size();
        for (std::size_t i = 0; i < n; ++i)
          d = std::min(d, detail::dist_point_segment(lambda, verts_[i], verts_[(i + 1) % n]));
        return d;
      }
    }
    return 0.0;
  }

  bool contains(cx lambda, double tol = 0.0) const { return dist_to_set(lambda) <= tol; }

  /// Membership with margin, using the relative interior for degenerate
  /// kinds (a segment has no planar interior but targets on it are usable).
  bool contains_with_margin(cx lambda, double margin) const {
    switch (kind_) {
      case Kind::disk:
      case Kind::polygon:
        return dist_to_boundary(lambda) >= margin;
      case Kind::segment: {
        if (dist_to_set(lambda) > 1e-12) return false;
        double d = std::min(std::abs(lambda - verts_[0]), std::abs(lambda - verts_[1]));
        return d >= margin;
      }
      case Kind::point:
        return margin <= 0.0 && dist_to_set(lambda) <= 1e-12;
    }
    return false;
  }

  /// A deep point of the region (center / centroid / midpoint).
  cx interior_point() const {
    switch (kind_) {
      case Kind::disk: return center_;
      case Kind::point: return verts_[0];
      case Kind::segment: return 0.5 * (verts_[0] + verts_[1]);
      case Kind::polygon: {
        cx s{0, 0};
        for (cx v : verts_) s += v;
        return s / static_cast<double>(verts_.size());
      }
    }
    return {0, 0};
  }

  /// A pair realizing the diameter. Ties: maximize |first endpoint|, then
  /// smallest argument in [0, 2pi).
  std::pair<cx, cx> diameter_pair() const {
    auto arg_key = [](cx z) {
      double a = std::arg(z);
      if (a < 0) a += 6.283185307179586476925286766559;
      return a;
    };
    auto better = [&](std::pair<cx, cx> cand, std::pair<cx, cx>& best, double d, double& bestd) {
      if (std::abs(cand.first) < std::abs(cand.second)) std::swap(cand.first, cand.second);
      if (d > bestd + 1e-15) {
        bestd = d;
        best = cand;
        return;
      }
      if (d < bestd - 1e-15) return;
      double ca = std::abs(cand.first), ba = std::abs(best.first);
      if (ca > ba + 1e-15 || (std::abs(ca - ba) <= 1e-15 && arg_key(cand.first) < arg_key(best.first) - 1e-15))
        best = cand;
    };
    switch (kind_) {
      case Kind::disk: {
        if (radius_ == 0) return {center_, center_};
        // antipodal pair maximizing |lambda|, then smallest argument
        double phi = std::abs(center_) > 0 ? std::arg(center_) : 0.0;
        cx u = std::polar(1.0, phi);
        return {center_ + radius_ * u, center_ - radius_ * u};
      }
      case Kind::point: return {verts_[0], verts_[0]};
      case Kind::segment: {
        std::pair<cx, cx> best{verts_[0], verts_[1]};
        double d = std::abs(verts_[1] - verts_[0]);
        double bd = -1;
        better(best, best, d, bd);
        return best;
      }
      case Kind::polygon: {
        std::pair<cx, cx> best{verts_[0], verts_[0]};
        double bd = -1;
        for (std::size_t i = 0; i < verts_.size(); ++i)
          for (std::size_t j = i + 1; j < verts_.size(); ++j)
            better({verts_[i], verts_[j]}, best, std::abs(verts_[i] - verts_[j]), bd);
        return best;
      }
    }
    return {cx{0, 0}, cx{0, 0}};
  }

  /// Image under z -> alpha*z + beta.
  ConvexRegion affine(cx alpha, cx beta) const {
    switch (kind_) {
      case Kind::disk: return disk(alpha * center_ + beta, std::abs(alpha) * radius_);
      case Kind::point: return point(alpha * verts_[0] + beta);
      case Kind::segment: return segment(alpha * verts_[0] + beta, alpha * verts_[1] + beta);
      case Kind::polygon: {
        std::vector<cx> vs;
        vs.reserve(verts_.size());
        for (cx v : verts_) vs.push_back(alpha * v + beta);
        return polygon(vs);
      }
    }
    return *this;
  }

private:
  Kind kind_ = Kind::point;
  cx center_{0, 0};
  double radius_ = 0.0;
  std::vector<cx> verts_{cx{0, 0}};
};

}  // namespace opforge::numrange
