// Copyright (c) the opforge authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "opforge/common.hpp"
#include "opforge/operator_model.hpp"
#include "opforge/region.hpp"

namespace opforge::numrange {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kStateValueTol = 1e-11;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// <M x, x> = x* M x for unit-intent x (normalized by the actual norm).
inline cx rayleigh(const Matrix& M, const Vector& x) {
  return x.dot(M * x) / x.squaredNorm();
}

struct BoundaryPoint {
  double angle = 0.0;
  cx value{0, 0};       // <M x, x>, a guaranteed member of W(M)
  Vector state;         // unit vector attaining it
};

struct SweepOptions {
  int n_angles = 256;
  bool adaptive = true;
  int max_refine_depth = 3;
};

namespace detail {

/// Boundary point in direction theta: top eigenvector of Re(e^{-i theta} M).
/// Never call directly in hot paths; BoundaryOracle memoizes per matrix.
inline BoundaryPoint boundary_point(const Matrix& M, double theta) {
  const cx rot = std::polar(1.0, -theta);
  Matrix H = 0.5 * (rot * M + std::conj(rot) * M.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success)
    fail(Error::Kind::construction, "boundary_point: eigensolver failed to converge");
  Vector x = es.eigenvectors().col(M.rows() - 1);
  x.normalize();
  BoundaryPoint p;
  p.angle = theta;
  p.state = x;
  p.value = rayleigh(M, x);
  return p;
}

struct SweepKey {
  std::uint64_t h1 = 0, h2 = 0;
  std::int64_t dim = 0;
  std::uint64_t angle_bits = 0;
  bool operator<(const SweepKey& o) const {
    if (h1 != o.h1) return h1 < o.h1;
    if (h2 != o.h2) return h2 < o.h2;
    if (dim != o.dim) return dim < o.dim;
    return angle_bits < o.angle_bits;
  }
};

// Memoizes supporting-direction eigensolves per (matrix fingerprint, angle).
// Toeplitz-like models compress to the same window matrix at every step, so
// repeated runs hit the cache almost always. A fingerprint collision would
// surface a state from another matrix; the value checks downstream reject it,
// so collisions cannot corrupt results silently.
class BoundaryOracle {
public:
  explicit BoundaryOracle(const Matrix& M) : M_(M) {
    auto mix = [](std::uint64_t h, std::uint64_t x) {
      h ^= x;
      h *= 0x100000001b3ull;
      return h;
    };
    h1_ = 1469598103934665603ull;
    h2_ = 0x9e3779b97f4a7c15ull;
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      for (Eigen::Index r = 0; r < M.rows(); ++r) {
        std::uint64_t re, im;
        const double dre = M(r, c).real(), dim = M(r, c).imag();
        std::memcpy(&re, &dre, 8);
        std::memcpy(&im, &dim, 8);
        h1_ = mix(mix(h1_, re), im);
        h2_ = mix(mix(h2_, im + 0x9e3779b9ull), re ^ 0xc2b2ae3d27d4eb4full);
      }
  }

  /// Quantizes to a 1/8192-turn lattice so nearby fan centers share entries.
  static double quantize(double theta) {
    double turns = theta / kTwoPi;
    turns -= std::floor(turns);
    return std::round(turns * 8192.0) / 8192.0 * kTwoPi;
  }

  BoundaryPoint at(double theta) const {
    const double q = quantize(theta);
    std::uint64_t bits;
    std::memcpy(&bits, &q, 8);
    SweepKey key{h1_, h2_, M_.rows(), bits};
    auto& cache = store();
    auto it = cache.find(key);
    if (it == cache.end()) {
      if (cache.size() > 200000) cache.clear();
      it = cache.emplace(key, boundary_point(M_, q)).first;
    }
    return it->second;
  }

private:
  static std::map<SweepKey, BoundaryPoint>& store() {
    static thread_local std::map<SweepKey, BoundaryPoint> cache;
    return cache;
  }

  const Matrix& M_;
  std::uint64_t h1_ = 0, h2_ = 0;
};

/// Monotone-chain hull over point values, returning indices in CCW order.
inline std::vector<std::size_t> hull_indices(const std::vector<cx>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].real() != pts[b].real()) return pts[a].real() < pts[b].real();
    if (pts[a].imag() != pts[b].imag()) return pts[a].imag() < pts[b].imag();
    return a < b;
  });
  order.erase(std::unique(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) { return pts[a] == pts[b]; }),
              order.end());
  const std::size_t n = order.size();
  if (n <= 2) return order;
  std::vector<std::size_t> hull(2 * n);
  std::size_t k = 0;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return detail::cross2(pts[a] - pts[o], pts[b] - pts[o]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], order[i]) <= 0) --k;
    hull[k++] = order[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], order[i]) <= 0) --k;
    hull[k++] = order[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace detail

struct BoundarySweep {
  std::vector<BoundaryPoint> points;

  std::vector<cx> values() const {
    std::vector<cx> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.value);
    return v;
  }

  /// Inscribed region: the hull of attained values, always a subset of W(M)
  /// by convexity, regardless of eigensolver quality.
  ConvexRegion hull() const { return ConvexRegion::polygon(values()); }
};

namespace detail {

/// Appends oracle points at the (quantized, deduplicated) angles.
inline void extend_sweep(const BoundaryOracle& oracle, BoundarySweep& sweep,
                         const std::vector<double>& angles) {
  for (double t : angles) {
    const double q = BoundaryOracle::quantize(t);
    bool seen = false;
    for (const auto& p : sweep.points)
      if (p.angle == q) {
        seen = true;
        break;
      }
    if (!seen) sweep.points.push_back(oracle.at(q));
  }
}

}  // namespace detail

/// Sweeps supporting directions and returns boundary-attaining states. With
/// `adaptive`, angle intervals whose endpoints land far apart are bisected
/// (flat facets / coarse sweeps).
inline BoundarySweep sweep_boundary(const Matrix& M, const std::vector<double>& angles,
                                    bool adaptive = false, int max_depth = 3) {
  BoundarySweep sweep;
  for (double t : angles) sweep.points.push_back(detail::boundary_point(M, t));
  if (adaptive && sweep.points.size() >= 4) {
    double diam = 0;
    for (const auto& a : sweep.points)
      for (const auto& b : sweep.points) diam = std::max(diam, std::abs(a.value - b.value));
    double gap_tol = 4.0 * diam / static_cast<double>(sweep.points.size());
    std::vector<BoundaryPoint> work = sweep.points;
    std::sort(work.begin(), work.end(),
              [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.angle < b.angle; });
    for (int depth = 0; depth < max_depth; ++depth) {
      std::vector<BoundaryPoint> extra;
      for (std::size_t i = 0; i < work.size(); ++i) {
        const auto& a = work[i];
        const auto& b = work[(i + 1) % work.size()];
        double hi = (i + 1 == work.size()) ? b.angle + kTwoPi : b.angle;
        if (std::abs(a.value - b.value) > gap_tol)
          extra.push_back(detail::boundary_point(M, 0.5 * (a.angle + hi)));
      }
      if (extra.empty()) break;
      work.insert(work.end(), extra.begin(), extra.end());
      std::sort(work.begin(), work.end(),
                [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.angle < b.angle; });
      sweep.points.insert(sweep.points.end(), extra.begin(), extra.end());
    }
  }
  return sweep;
}

/// Uniform sweep of n_angles supporting directions.
inline BoundarySweep numerical_range_boundary(const Matrix& M, int n_angles,
                                              const SweepOptions& opts = {}) {
  if (M.rows() != M.cols()) fail(Error::Kind::precondition, "numerical_range_boundary: non-square matrix");
  if (n_angles < 8) fail(Error::Kind::precondition, "numerical_range_boundary: need n_angles >= 8");
  std::vector<double> angles(n_angles);
  for (int i = 0; i < n_angles; ++i) angles[i] = kTwoPi * i / n_angles;
  return sweep_boundary(M, angles, opts.adaptive, opts.max_refine_depth);
}

namespace detail {

/// Unit vector on the path between states x and y whose value is the target,
/// assuming the target lies on the segment [value(x), value(y)]. Phase is
/// chosen so the value path stays on that segment; the crossing is found by
/// bisection and evaluated on the actual vectors.
inline Vector two_state_interpolate(const Matrix& M, const Vector& x, const Vector& y, cx target) {
  const cx vx = rayleigh(M, x);
  const cx vy = rayleigh(M, y);
  const cx span = vy - vx;
  if (std::abs(span) < 1e-15) return x;

  // Scale M so values map x -> 0, y -> 1; the target becomes tau in [0, 1].
  Matrix Mp = (M - vx * Matrix::Identity(M.rows(), M.cols())) / span;
  double tau = ((target - vx) / span).real();
  tau = std::clamp(tau, 0.0, 1.0);

  // Phase alignment: with S the imaginary part of Mp, pick theta such that
  // Re <S e^{i theta} x, y> = 0; then Im of the path value vanishes.
  Matrix S = (Mp - Mp.adjoint()) / cx{0, 2};
  cx c = y.dot(S * x);  // <S x, y>
  double theta = (std::abs(c) < 1e-300) ? 0.0 : (1.5707963267948966 - std::arg(c));
  Vector xr = std::polar(1.0, theta) * x;

  auto path_value = [&](double s) -> cx {
    Vector p = (1.0 - s) * xr + s * y;
    double n2 = p.squaredNorm();
    if (n2 < 1e-24) return cx{0.5, 0.0};  // antipodal guard; never hit for vx != vy
    return p.dot(Mp * p) / n2;
  };

  double lo = 0.0, hi = 1.0;
  double flo = path_value(lo).real() - tau;
  if (flo > 0) std::swap(lo, hi);
  for (int it = 0; it < 120; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double f = path_value(mid).real() - tau;
    if (f <= 0)
      lo = mid;
    else
      hi = mid;
  }
  double s = 0.5 * (lo + hi);
  Vector out = (1.0 - s) * xr + s * y;
  out.normalize();
  return out;
}

inline bool in_triangle(cx p, cx a, cx b, cx c) {
  double d1 = cross2(b - a, p - a);
  double d2 = cross2(c - b, p - b);
  double d3 = cross2(a - c, p - c);
  bool neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
  bool pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
  return !(neg && pos);
}

}  // namespace detail

/// Unit state whose value under M equals `lambda`, built from an existing
/// sweep. Requires lambda certified inside the sweep's inscribed hull with
/// the given margin (relative interior for degenerate hulls). Throws
/// Error::Kind::precondition when certification fails and
/// Error::Kind::construction when the path search stalls out of tolerance.
inline Vector state_with_value(const Matrix& M, const BoundarySweep& sweep, cx lambda,
                               double margin) {
  if (margin <= 0) fail(Error::Kind::precondition, "state_with_value: margin must be positive");
  // An attained value needs no certification (this also serves boundary
  // targets that happen to be eigenvalues, where the margin test cannot pass).
  for (const auto& p : sweep.points)
    if (std::abs(p.value - lambda) <= 1e-12) return p.state;

  ConvexRegion hull = sweep.hull();
  if (!hull.contains_with_margin(lambda, margin))
    fail(Error::Kind::precondition, "state_with_value: target not certified inside W(M) with margin");

  const auto values = sweep.values();

  Vector result;
  if (hull.kind() == ConvexRegion::Kind::segment || hull.kind() == ConvexRegion::Kind::point) {
    // Collinear range: straddle the target along the segment direction.
    cx a = hull.kind() == ConvexRegion::Kind::point ? values.front() : hull.vertices()[0];
    cx b = hull.kind() == ConvexRegion::Kind::point ? values.front() : hull.vertices()[1];
    cx dir = (b - a);
    double len = std::abs(dir);
    if (len < 1e-15) return sweep.points.front().state;
    dir /= len;
    auto coord = [&](cx z) { return ((z - a) / dir).real(); };
    double t = coord(lambda);
    std::size_t ilo = 0, ihi = 0;
    double best_lo = -std::numeric_limits<double>::infinity();
    double best_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
      double ci = coord(values[i]);
      if (ci <= t && ci > best_lo) best_lo = ci, ilo = i;
      if (ci >= t && ci < best_hi) best_hi = ci, ihi = i;
    }
    result = detail::two_state_interpolate(M, sweep.points[ilo].state, sweep.points[ihi].state,
                                           lambda);
  } else {
    // Fan triangulation of the hull: lambda lies in some (h0, hi, hi+1).
    auto hidx = detail::hull_indices(values);
    std::size_t a = hidx[0], b = 0, c = 0;
    bool found = false;
    for (std::size_t i = 1; i + 1 < hidx.size(); ++i) {
      if (detail::in_triangle(lambda, values[a], values[hidx[i]], values[hidx[i + 1]])) {
        b = hidx[i];
        c = hidx[i + 1];
        found = true;
        break;
      }
    }
    if (!found)
      fail(Error::Kind::construction, "state_with_value: no containing triangle (degenerate hull)");
    // Reduce: shoot the ray from value(c) through lambda onto segment [va, vb].
    cx va = values[a], vb = values[b], vc = values[c];
    // Solve vc + t (lambda - vc) = va + u (vb - va).
    cx d1 = lambda - vc, d2 = vb - va;
    double det = detail::cross2(d1, d2);
    double u;
    if (std::abs(det) < 1e-18 * std::max(1.0, std::abs(d1) * std::abs(d2))) {
      u = 0.0;  // lambda on the a-c edge; q collapses to va
    } else {
      u = detail::cross2(va - vc, d1) / det;
      u = std::clamp(u, 0.0, 1.0);
    }
    cx q = va + u * d2;
    Vector yq = detail::two_state_interpolate(M, sweep.points[a].state, sweep.points[b].state, q);
    result = detail::two_state_interpolate(M, sweep.points[c].state, yq, lambda);
  }

  cx got = rayleigh(M, result);
  if (std::abs(got - lambda) > kStateValueTol)
    fail(Error::Kind::construction, "state_with_value: path search stalled (value error " +
                                        std::to_string(std::abs(got - lambda)) + ")");
  return result;
}

/// Solves the inverse problem <M x, x> = lambda from scratch: sweeps the
/// boundary, certifies the target with margin against the inscribed hull,
/// and interpolates along Toeplitz-Hausdorff paths.
inline Vector find_state_with_value(const Matrix& M, cx lambda, double margin,
                                    int n_angles = 32) {
  BoundarySweep sweep = numerical_range_boundary(M, n_angles, {n_angles, true, 2});
  // Fan of directions toward the target sharpens the hull where it matters.
  cx centroid = M.trace() / static_cast<double>(M.rows());
  if (std::abs(lambda - centroid) > 1e-12) {
    double phi = std::arg(lambda - centroid);
    double delta = std::clamp(0.5 * std::sqrt(margin), 5e-3, 0.3);
    auto extra = sweep_boundary(M, {phi, phi - delta, phi + delta, phi - 2 * delta, phi + 2 * delta});
    sweep.points.insert(sweep.points.end(), extra.points.begin(), extra.points.end());
  }
  return state_with_value(M, sweep, lambda, margin);
}

// Standard-basis window [start, start + length) used to compress an operator
// model to a finite matrix, optionally inside the orthocomplement of finitely
// many excluded directions.
struct CompressionWindow {
  index_t start = 0;
  index_t length = 0;
  std::vector<seqspace::FinVec> excluded;

  Matrix base_matrix(const seqspace::OperatorModel& T) const {
    Matrix M(length, length);
    for (index_t r = 0; r < length; ++r)
      for (index_t c = 0; c < length; ++c) M(r, c) = T.entry_at(start + r, start + c);
    return M;
  }

  /// Orthonormal basis of window-space minus the excluded directions
  /// (identity when nothing intersects the window).
  Matrix complement_basis() const {
    if (excluded.empty()) return Matrix::Identity(length, length);
    Matrix C(length, excluded.size());
    C.setZero();
    bool any = false;
    for (std::size_t k = 0; k < excluded.size(); ++k)
      for (const auto& [idx, coef] : excluded[k])
        if (idx >= start && idx < start + length) {
          C(idx - start, static_cast<index_t>(k)) = coef;
          any = true;
        }
    if (!any) return Matrix::Identity(length, length);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(C);
    index_t rank = cod.rank();
    Matrix Q = cod.householderQ();
    return Q.rightCols(length - rank);
  }

  Matrix matrix(const seqspace::OperatorModel& T) const {
    Matrix Q = complement_basis();
    if (Q.cols() == length) return base_matrix(T);
    return Q.adjoint() * base_matrix(T) * Q;
  }

  seqspace::FinVec lift(const Matrix& Q, const Vector& x) const {
    Vector w = (Q.cols() == length && Q.isIdentity(0.0)) ? x : Vector(Q * x);
    seqspace::FinVec v;
    for (index_t r = 0; r < length; ++r) v.set(start + r, w(r));
    return v;
  }
};

struct WindowPolicy {
  index_t initial_length = 64;
  index_t max_length = index_t{1} << 14;
};

struct ComplementState {
  seqspace::FinVec v;
  index_t window_start = 0;
  index_t window_length = 0;
};

/// Unit vector v with <T v, v> = lambda supported strictly beyond the
/// constraints, so that v (and, for image_depth >= 1, T v and T* v, etc.)
/// is orthogonal to every constraint exactly by support separation. The far
/// window grows by doubling until the target certifies inside the
/// compression's numerical range with the requested margin.
inline ComplementState find_state_in_complement(const seqspace::OperatorModel& T,
                                                const std::vector<const seqspace::FinVec*>& constraints,
                                                cx lambda, double margin, int image_depth = 1,
                                                const WindowPolicy& policy = {}) {
  if (margin <= 0) fail(Error::Kind::precondition, "find_state_in_complement: margin must be positive");
  if (!T.we_region.contains_with_margin(lambda, margin))
    fail(Error::Kind::precondition,
         "find_state_in_complement: target not inside the essential numerical range with margin");

  index_t horizon = -1;
  for (const auto* c : constraints)
    if (c) horizon = std::max(horizon, c->max_index());
  const index_t start = std::max<index_t>(1, horizon + 1 + image_depth * T.band_width);

  const double delta = std::clamp(0.5 * std::sqrt(margin / std::max(1.0, T.norm_bound)), 5e-3, 0.3);
  for (index_t len = policy.initial_length; len <= policy.max_length; len *= 2) {
    CompressionWindow win{start, len, {}};
    Matrix M = win.base_matrix(T);
    detail::BoundaryOracle oracle(M);
    cx centroid = M.trace() / static_cast<double>(len);
    double phi = std::abs(lambda - centroid) > 1e-12 ? std::arg(lambda - centroid) : 0.0;

    // staged certification: cached coarse sweep, then a fan toward the
    // target, then a dense sweep, before paying for a larger window
    std::vector<std::vector<double>> stages;
    std::vector<double> base;
    for (int i = 0; i < 16; ++i) base.push_back(kTwoPi * i / 16);
    stages.push_back(base);
    std::vector<double> fan;
    for (double off : {0.0, -delta, delta, -2 * delta, 2 * delta})
      fan.push_back(phi + off);
    stages.push_back(fan);
    std::vector<double> dense;
    for (int i = 0; i < 64; ++i) dense.push_back(kTwoPi * i / 64);
    stages.push_back(dense);

    BoundarySweep sweep;
    for (const auto& stage : stages) {
      detail::extend_sweep(oracle, sweep, stage);
      if (sweep.hull().contains_with_margin(lambda, margin)) {
        Vector x = state_with_value(M, sweep, lambda, margin);
        seqspace::FinVec v = win.lift(Matrix::Identity(len, len), x);
        cx got = seqspace::inner_product(T.apply(v), v);
        if (std::abs(got - lambda) > kStateValueTol)
          fail(Error::Kind::construction, "find_state_in_complement: lifted value out of tolerance");
        return {std::move(v), start, len};
      }
    }
  }
  fail(Error::Kind::construction,
       "find_state_in_complement: window cap reached; target too close to the boundary of W_e "
       "or we_region mis-specified");
}

/// Validation helper for analytically supplied regions: sweeps a far-window
/// compression and reports how far its inscribed hull pokes outside the
/// declared W_e. A correct region gives ~0 (the compression range sits
/// inside W((I-P)T|) whose closure contains W_e but whose inscribed hull
/// cannot exceed it by more than solver noise when the declaration is
/// honest); a defect signals a mis-specified region.
inline double we_region_outward_defect(const seqspace::OperatorModel& T, index_t window_start,
                                       index_t window_length, int n_angles = 64) {
  CompressionWindow win{std::max<index_t>(1, window_start), window_length, {}};
  auto sweep = numerical_range_boundary(win.base_matrix(T), n_angles, {n_angles, false, 0});
  double worst = 0.0;
  for (const auto& p : sweep.points) worst = std::max(worst, T.we_region.dist_to_set(p.value));
  return worst;
}

}  // namespace opforge::numrange
