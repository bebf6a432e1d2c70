#pragma once

// One-dimensional weighted Delaunay mosaics of slices by a line.
//
// Rotating every point about the line into the upper half-plane preserves its
// distance to the line, so a generator is just (x1, x2) with x2 >= 0 and power
// function p(a) = (a - x1)^2 + x2^2. All power functions share the leading
// coefficient, so their lower envelope is the lower envelope of the lines
// -2 x1 a + (x1^2 + x2^2); a generator survives iff its line appears on it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "anchormosaic/geometry.hpp"
#include "anchormosaic/mosaic_types.hpp"

namespace anchormosaic {

/// Point of the closed upper half-plane: position along the line and distance to it.
struct HalfPlanePoint {
  double x1 = 0.0;
  double x2 = 0.0;

  double power(double a) const { return (a - x1) * (a - x1) + x2 * x2; }
  WeightedPoint weighted() const {
    WeightedPoint wp;
    wp.y = Eigen::VectorXd::Constant(1, x1);
    wp.w = -x2 * x2;
    wp.preimage = PointN{x1, x2};
    return wp;
  }
};

inline HalfPlanePoint rotate_to_halfplane(const PointN& x) {
  if (x.dim() < 2) throw DomainError("rotate_to_halfplane: need n >= 2");
  return {x[0], x.coords.tail(x.dim() - 1).norm()};
}

inline std::vector<HalfPlanePoint> rotate_to_halfplane(std::span<const PointN> xs) {
  std::vector<HalfPlanePoint> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(rotate_to_halfplane(x));
  return out;
}

struct Mosaic1D {
  struct Vertex {
    int generator = 0;  ///< index into `generators`
    double cell_lo = -std::numeric_limits<double>::infinity();
    double cell_hi = std::numeric_limits<double>::infinity();
    double radius = 0.0;
    double anchor = 0.0;
    int interval = -1;
  };
  struct Edge {
    int left = 0;   ///< vertex index (cell left of the boundary)
    int right = 0;  ///< vertex index (cell right of the boundary)
    double anchor = 0.0;  ///< shared cell boundary
    double radius = 0.0;
    int interval = -1;
  };

  std::vector<HalfPlanePoint> generators;
  std::vector<Vertex> vertices;  ///< surviving generators, left to right
  std::vector<Edge> edges;       ///< edges[i] joins vertices[i] and vertices[i+1]
  std::vector<Interval> intervals;
  Range window;
  bool annotated = false;

  double radius(SimplexId s) const { return s.dim == 0 ? vertices[s.index].radius : edges[s.index].radius; }
  double anchor(SimplexId s) const { return s.dim == 0 ? vertices[s.index].anchor : edges[s.index].anchor; }
};

namespace mosaic1d_detail {

// Abscissa where the power functions of p and q agree (p.x1 != q.x1).
inline double bisector(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  return ((q.x1 - p.x1) * (q.x1 + p.x1) + (q.x2 - p.x2) * (q.x2 + p.x2)) / (2.0 * (q.x1 - p.x1));
}

}  // namespace mosaic1d_detail

/// Lower envelope of the power functions by a convex-hull sweep, O(N log N).
inline Mosaic1D build_1d(std::vector<HalfPlanePoint> points, Range window) {
  Mosaic1D out;
  out.window = window;
  out.generators = std::move(points);
  const auto& g = out.generators;
  for (const auto& p : g) {
    if (!std::isfinite(p.x1) || !std::isfinite(p.x2) || p.x2 < 0.0) {
      throw DomainError("build_1d: generators must be finite with x2 >= 0");
    }
  }
  if (g.empty()) return out;

  std::vector<int> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g[a].x1 != g[b].x1) return g[a].x1 < g[b].x1;
    return g[a].x2 < g[b].x2;
  });

  std::vector<int> hull;         // candidate generators, increasing x1
  std::vector<double> breaks;    // breaks[i] = boundary between hull[i] and hull[i+1]
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const int idx = order[pos];
    if (pos > 0) {
      const auto& prev = g[order[pos - 1]];
      if (prev.x1 == g[idx].x1) {
        if (prev.x2 == g[idx].x2) throw DegeneracyError("build_1d: duplicated generator");
        continue;  // same projection, larger distance: never minimal
      }
    }
    while (!hull.empty()) {
      const double b = mosaic1d_detail::bisector(g[hull.back()], g[idx]);
      if (!breaks.empty() && b <= breaks.back()) {
        hull.pop_back();
        breaks.pop_back();
      } else {
        breaks.push_back(b);
        break;
      }
    }
    hull.push_back(idx);
  }

  out.vertices.resize(hull.size());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    auto& v = out.vertices[i];
    v.generator = hull[i];
    if (i > 0) v.cell_lo = breaks[i - 1];
    if (i + 1 < hull.size()) v.cell_hi = breaks[i];
  }
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    Mosaic1D::Edge e;
    e.left = static_cast<int>(i);
    e.right = static_cast<int>(i + 1);
    e.anchor = breaks[i];
    out.edges.push_back(e);
  }
  return out;
}

/// Radius function and interval decomposition.
///
/// A vertex's radius^2 is the minimum of its power function over its cell,
/// attained at x1 clamped to the cell; an edge's radius^2 is the power at the
/// shared boundary. A vertex whose minimum sits on a boundary shares the
/// sphere of that edge. Interval types are cross-checked with the visibility
/// test on the upper bound.
inline Mosaic1D radius_and_intervals_1d(Mosaic1D m, std::span<const HalfPlanePoint> cloud = {},
                                        double rel_tol = 1e-9) {
  (void)cloud;  // the mosaic keeps its own copy of the generators
  const auto& g = m.generators;
  m.intervals.clear();
  for (auto& e : m.edges) {
    const auto& p = g[m.vertices[e.left].generator];
    const auto& q = g[m.vertices[e.right].generator];
    e.radius = std::sqrt(p.power(e.anchor));
    e.interval = -1;
    // The two power functions agree at the boundary up to rounding.
    const double pq = std::abs(p.power(e.anchor) - q.power(e.anchor));
    if (pq > 1e-7 * std::max(1.0, p.power(e.anchor))) {
      throw NumericalError("radius_and_intervals_1d: boundary is not equal-power");
    }
  }
  // paired_edge[v] = edge index whose sphere the vertex shares, or -1.
  std::vector<int> paired_edge(m.vertices.size(), -1);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    auto& v = m.vertices[i];
    v.interval = -1;
    const auto& p = g[v.generator];
    const double scale = std::max({1.0, std::abs(p.x1), p.x2});
    for (double bound : {v.cell_lo, v.cell_hi}) {
      if (std::isfinite(bound) && std::abs(p.x1 - bound) < rel_tol * scale) {
        throw ToleranceError("radius_and_intervals_1d: generator projects onto a cell boundary");
      }
    }
    if (p.x1 < v.cell_lo) {
      v.anchor = v.cell_lo;
      paired_edge[i] = static_cast<int>(i) - 1;
    } else if (p.x1 > v.cell_hi) {
      v.anchor = v.cell_hi;
      paired_edge[i] = static_cast<int>(i);
    } else {
      v.anchor = p.x1;
    }
    v.radius = paired_edge[i] >= 0 ? m.edges[paired_edge[i]].radius : p.x2;
  }

  std::vector<int> vertex_of_edge(m.edges.size(), -1);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    if (paired_edge[i] < 0) continue;
    if (vertex_of_edge[paired_edge[i]] >= 0) {
      throw ToleranceError("radius_and_intervals_1d: two vertices share one edge sphere");
    }
    vertex_of_edge[paired_edge[i]] = static_cast<int>(i);
  }

  auto make_sphere = [](double anchor, double radius) {
    AnchoredSphere s;
    s.anchor = Eigen::VectorXd::Constant(1, anchor);
    s.radius = radius;
    return s;
  };

  // Emit intervals left to right by anchor: vertex cells and boundaries interleave.
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    auto& v = m.vertices[i];
    if (paired_edge[i] < 0) {
      Interval iv;
      iv.lower = iv.upper = {0, static_cast<int>(i)};
      iv.type = {0, 0};
      iv.sphere = make_sphere(v.anchor, v.radius);
      iv.members = {iv.lower};
      v.interval = static_cast<int>(m.intervals.size());
      m.intervals.push_back(std::move(iv));
    }
    if (i < m.edges.size()) {
      auto& e = m.edges[i];
      Interval iv;
      iv.upper = {1, static_cast<int>(i)};
      iv.sphere = make_sphere(e.anchor, e.radius);
      const int paired = vertex_of_edge[i];
      if (paired >= 0) {
        iv.lower = {0, paired};
        iv.type = {0, 1};
        iv.members = {iv.lower, iv.upper};
      } else {
        iv.lower = iv.upper;
        iv.type = {1, 1};
        iv.members = {iv.upper};
      }
      const WeightedPoint ends[2] = {g[m.vertices[e.left].generator].weighted(),
                                     g[m.vertices[e.right].generator].weighted()};
      const IntervalType seen = visibility_type(iv.sphere, ends, rel_tol);
      if (seen != iv.type) {
        throw ToleranceError("radius_and_intervals_1d: sphere grouping disagrees with visibility");
      }
      const int id = static_cast<int>(m.intervals.size());
      e.interval = id;
      if (paired >= 0) m.vertices[paired].interval = id;
      m.intervals.push_back(std::move(iv));
    }
  }
  // A vertex paired with edge i-1 was assigned when edge i-1 was emitted.
  m.annotated = true;
  return m;
}

/// Exhaustive structural audit of an annotated 1D mosaic against its cloud.
inline AuditReport audit_1d(const Mosaic1D& m, std::span<const HalfPlanePoint> cloud, double rel_tol = 1e-9) {
  AuditReport rep;
  if (!m.annotated) {
    rep.fail("mosaic is not annotated");
    return rep;
  }
  const auto& g = m.generators;
  // Partition and member counts.
  std::vector<int> seen_v(m.vertices.size(), 0);
  std::vector<int> seen_e(m.edges.size(), 0);
  for (std::size_t id = 0; id < m.intervals.size(); ++id) {
    const auto& iv = m.intervals[id];
    ++rep.checks;
    if (!(iv.type == IntervalType{0, 0} || iv.type == IntervalType{0, 1} || iv.type == IntervalType{1, 1})) {
      rep.fail("interval " + std::to_string(id) + " has a type impossible in 1D");
    }
    const std::size_t expect = std::size_t{1} << (iv.type.m - iv.type.ell);
    if (iv.members.size() != expect) rep.fail("interval " + std::to_string(id) + " has wrong member count");
    for (auto s : iv.members) {
      if (s.dim == 0) ++seen_v[s.index];
      else ++seen_e[s.index];
      const double dr = std::abs(m.radius(s) - iv.sphere.radius);
      const double da = std::abs(m.anchor(s) - iv.sphere.anchor[0]);
      if (dr > 1e-9 * std::max(1.0, iv.sphere.radius) || da > 1e-9 * std::max(1.0, std::abs(iv.sphere.anchor[0]))) {
        rep.fail("member of interval " + std::to_string(id) + " does not share its sphere");
      }
    }
    // The sphere of the upper bound is its smallest anchored circumsphere.
    std::vector<WeightedPoint> up;
    if (iv.upper.dim == 0) {
      up.push_back(g[m.vertices[iv.upper.index].generator].weighted());
    } else {
      const auto& e = m.edges[iv.upper.index];
      up.push_back(g[m.vertices[e.left].generator].weighted());
      up.push_back(g[m.vertices[e.right].generator].weighted());
    }
    const auto smallest = smallest_anchored_circumsphere(std::span<const WeightedPoint>(up));
    if (std::abs(smallest.radius - iv.sphere.radius) > 1e-7 * std::max(1.0, iv.sphere.radius)) {
      rep.fail("upper bound of interval " + std::to_string(id) + " is not at its smallest sphere");
    }
  }
  for (std::size_t i = 0; i < seen_v.size(); ++i) {
    ++rep.checks;
    if (seen_v[i] != 1) rep.fail("vertex " + std::to_string(i) + " lies in " + std::to_string(seen_v[i]) + " intervals");
  }
  for (std::size_t i = 0; i < seen_e.size(); ++i) {
    ++rep.checks;
    if (seen_e[i] != 1) rep.fail("edge " + std::to_string(i) + " lies in " + std::to_string(seen_e[i]) + " intervals");
  }
  // Monotonicity of the radius function.
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const auto& e = m.edges[i];
    ++rep.checks;
    const double slack = 1e-12 * std::max(1.0, e.radius);
    if (m.vertices[e.left].radius > e.radius + slack || m.vertices[e.right].radius > e.radius + slack) {
      rep.fail("edge " + std::to_string(i) + " has smaller radius than an endpoint");
    }
  }
  // Emptiness of every simplex's sphere with respect to the whole cloud.
  auto check_empty = [&](double anchor, double radius, const std::string& what) {
    ++rep.checks;
    const double limit = radius - rel_tol * std::max(1.0, radius);
    if (limit <= 0.0) return;
    for (const auto& p : cloud) {
      if (p.power(anchor) < limit * limit) {
        rep.fail(what + " has a non-empty anchored sphere");
        return;
      }
    }
  };
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    check_empty(m.vertices[i].anchor, m.vertices[i].radius, "vertex " + std::to_string(i));
  }
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    check_empty(m.edges[i].anchor, m.edges[i].radius, "edge " + std::to_string(i));
  }
  // Alternation: critical vertices and critical edges alternate; pairs between a
  // critical vertex and the next critical edge are edge-vertex pairs (the
  // vertex's cell lies right of the anchor), the others vertex-edge pairs.
  int last_critical = -1;  // 0 = vertex, 1 = edge
  for (std::size_t id = 0; id < m.intervals.size(); ++id) {
    const auto& iv = m.intervals[id];
    ++rep.checks;
    if (id > 0 && iv.sphere.anchor[0] <= m.intervals[id - 1].sphere.anchor[0]) {
      rep.fail("intervals are not ordered by anchor");
    }
    if (iv.type.ell == iv.type.m) {
      if (last_critical == iv.type.m) rep.fail("critical simplices of equal dimension are adjacent");
      last_critical = iv.type.m;
      continue;
    }
    const auto& e = m.edges[iv.upper.index];
    const bool vertex_right = iv.lower.index == e.right;
    if (last_critical == 0 && !vertex_right) rep.fail("vertex-edge pair on an ascending stretch");
    if (last_critical == 1 && vertex_right) rep.fail("edge-vertex pair on a descending stretch");
  }
  return rep;
}

}  // namespace anchormosaic
