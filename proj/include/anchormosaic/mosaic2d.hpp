#pragma once

// Regular (weighted Delaunay) triangulations of k=2 slices, their power
// diagrams, the anchored radius function, and its interval decomposition.
//
// The triangulation is the projected lower convex hull of the lifted points
// (y, |y|^2 - w). It is built by incremental insertion in spatial order with
// an infinite vertex closing off the convex hull, so that insertion in
// conflict-region form handles hull growth and submerged points uniformly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "anchormosaic/geometry.hpp"
#include "anchormosaic/mosaic_types.hpp"

namespace anchormosaic {

struct RegularTriangulation {
  std::vector<WeightedPoint> points;                   ///< all input points
  std::vector<int> vertices;                           ///< input index of each surviving vertex
  std::vector<int> hidden;                             ///< input indices of submerged points
  std::vector<std::array<int, 3>> triangles;           ///< vertex indices, counter-clockwise
  std::vector<std::array<int, 3>> triangle_neighbors;  ///< across the edge opposite corner i; -1 on the hull
  std::vector<std::array<int, 3>> triangle_edges;      ///< edge opposite corner i
  std::vector<std::array<int, 2>> edges;               ///< vertex indices, first < second
  std::vector<std::array<int, 2>> edge_triangles;      ///< triangle left of first->second, then right; -1 if none
  std::vector<std::vector<int>> vertex_edges;

  const WeightedPoint& point(int vertex) const { return points[vertices[vertex]]; }
  Eigen::Vector2d position(int vertex) const { return point(vertex).y.head<2>(); }
  double height(int vertex) const { return point(vertex).y.squaredNorm() - point(vertex).w; }
  Eigen::Vector3d lifted(int vertex) const {
    const auto p = position(vertex);
    return {p.x(), p.y(), height(vertex)};
  }
  bool on_hull(int edge) const { return edge_triangles[edge][0] < 0 || edge_triangles[edge][1] < 0; }
};

struct PowerDiagram {
  /// Dual of a triangulation edge: a segment between two diagram vertices, or
  /// a ray leaving `from` in the unit `direction`.
  struct Edge {
    int from = -1;
    int to = -1;
    Eigen::Vector2d direction = Eigen::Vector2d::Zero();
    bool ray = false;
  };
  struct Cell {
    std::vector<int> edges;     ///< dual edges, counter-clockwise around the generator
    std::vector<int> vertices;  ///< diagram vertices of the bounded part, counter-clockwise
    bool bounded = true;
  };

  std::vector<Eigen::Vector2d> vertices;  ///< one per triangle: its equal-power point
  std::vector<Edge> edges;                ///< one per triangulation edge
  std::vector<Cell> cells;                ///< one per triangulation vertex
};

namespace mosaic2d_detail {

constexpr int kInf = -1;
constexpr double kPredicateTol = 1e-12;

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};
  bool alive = true;
  bool infinite() const { return v[0] == kInf || v[1] == kInf || v[2] == kInf; }
  int index_of(int x) const { return v[0] == x ? 0 : (v[1] == x ? 1 : 2); }
};

// Hilbert index on a 2^16 grid, for locality of insertion.
inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << 15; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) > 0;
    const std::uint32_t ry = (y & s) > 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

class Builder {
 public:
  explicit Builder(std::span<const WeightedPoint> pts) {
    x_.reserve(pts.size());
    for (const auto& p : pts) {
      if (p.dim() != 2) throw DomainError("regular_triangulation: points must live in R^2");
      if (!std::isfinite(p.y[0]) || !std::isfinite(p.y[1]) || !std::isfinite(p.w)) {
        throw DomainError("regular_triangulation: non-finite input");
      }
      x_.push_back(p.y[0]);
      y_.push_back(p.y[1]);
      w_.push_back(p.w);
    }
  }

  void run() {
    const int n = static_cast<int>(x_.size());
    if (n < 3) throw DomainError("regular_triangulation: need at least 3 points");
    std::vector<int> order = spatial_order();
    check_duplicates(order);
    const std::size_t start = initial_triangle(order);
    for (std::size_t i = start; i < order.size(); ++i) insert(order[i]);
  }

  std::vector<Tri> tris;
  std::vector<char> hidden;

 private:
  std::vector<double> x_, y_, w_;
  int last_ = 0;
  std::mt19937 walk_rng_{12345u};

  std::vector<int> spatial_order() const {
    const int n = static_cast<int>(x_.size());
    const auto [xlo, xhi] = std::minmax_element(x_.begin(), x_.end());
    const auto [ylo, yhi] = std::minmax_element(y_.begin(), y_.end());
    const double sx = std::max(*xhi - *xlo, 1e-300);
    const double sy = std::max(*yhi - *ylo, 1e-300);
    std::vector<std::uint64_t> key(n);
    for (int i = 0; i < n; ++i) {
      const auto gx = static_cast<std::uint32_t>(std::min(65535.0, (x_[i] - *xlo) / sx * 65535.0));
      const auto gy = static_cast<std::uint32_t>(std::min(65535.0, (y_[i] - *ylo) / sy * 65535.0));
      key[i] = hilbert_index(gx, gy);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    return order;
  }

  void check_duplicates(const std::vector<int>& order) const {
    std::vector<int> s = order;
    std::sort(s.begin(), s.end(), [&](int a, int b) { return x_[a] != x_[b] ? x_[a] < x_[b] : y_[a] < y_[b]; });
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (x_[s[i]] == x_[s[i - 1]] && y_[s[i]] == y_[s[i - 1]]) {
        throw DegeneracyError("regular_triangulation: two points share a projection");
      }
    }
  }

  double orient_raw(int a, int b, int p) const {
    return (x_[b] - x_[a]) * (y_[p] - y_[a]) - (y_[b] - y_[a]) * (x_[p] - x_[a]);
  }

  // +1 left turn, -1 right turn, 0 within tolerance.
  int orient(int a, int b, int p) const {
    const double l = (x_[b] - x_[a]) * (y_[p] - y_[a]);
    const double r = (y_[b] - y_[a]) * (x_[p] - x_[a]);
    const double det = l - r;
    const double bound = kPredicateTol * (std::abs(l) + std::abs(r));
    if (det > bound) return 1;
    if (det < -bound) return -1;
    return 0;
  }

  // Lifted orientation relative to p; > 0 iff p lifts strictly below the plane
  // of the counter-clockwise triangle abc.
  int power_test(int a, int b, int c, int p) const {
    const double ax = x_[a] - x_[p], ay = y_[a] - y_[p];
    const double bx = x_[b] - x_[p], by = y_[b] - y_[p];
    const double cx = x_[c] - x_[p], cy = y_[c] - y_[p];
    const double ah = ax * ax + ay * ay - w_[a] + w_[p];
    const double bh = bx * bx + by * by - w_[b] + w_[p];
    const double ch = cx * cx + cy * cy - w_[c] + w_[p];
    const double m1 = bx * cy - by * cx;
    const double m2 = ax * cy - ay * cx;
    const double m3 = ax * by - ay * bx;
    const double det = ah * m1 - bh * m2 + ch * m3;
    const double perm = std::abs(ah) * (std::abs(bx * cy) + std::abs(by * cx)) +
                        std::abs(bh) * (std::abs(ax * cy) + std::abs(ay * cx)) +
                        std::abs(ch) * (std::abs(ax * by) + std::abs(ay * bx));
    const double bound = kPredicateTol * perm;
    if (det > bound) return 1;
    if (det < -bound) return -1;
    throw DegeneracyError("regular_triangulation: four lifted points are coplanar within tolerance");
  }

  bool in_conflict(const Tri& t, int p) const {
    if (!t.infinite()) return power_test(t.v[0], t.v[1], t.v[2], p) > 0;
    const int i = t.index_of(kInf);
    const int o = orient(t.v[(i + 1) % 3], t.v[(i + 2) % 3], p);
    if (o == 0) throw DegeneracyError("regular_triangulation: point is collinear with a hull edge");
    return o > 0;
  }

  std::size_t initial_triangle(std::vector<int>& order) {
    const int a = order[0];
    int b = order[1];
    std::size_t c_pos = 0;
    for (std::size_t i = 2; i < order.size(); ++i) {
      if (orient(a, b, order[i]) != 0) {
        c_pos = i;
        break;
      }
    }
    if (c_pos == 0) throw DegeneracyError("regular_triangulation: all projections are collinear");
    // Keep the skipped collinear points for later insertion.
    const int c = order[c_pos];
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(c_pos));
    order.insert(order.begin() + 2, c);
    int c0 = c;
    if (orient(a, b, c) < 0) std::swap(b, c0);
    hidden.assign(x_.size(), 0);
    tris.clear();
    tris.push_back({{a, b, c0}});
    tris.push_back({{c0, b, kInf}});
    tris.push_back({{a, c0, kInf}});
    tris.push_back({{b, a, kInf}});
    link_all();
    last_ = 0;
    return 3;
  }

  // Pairs directed edge x->y of one triangle with y->x of another.
  void link_all() {
    std::unordered_map<std::int64_t, std::pair<int, int>> open;
    auto key = [](int x, int y) { return (static_cast<std::int64_t>(x) + 1) * 4294967296LL + (y + 1); };
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      for (int i = 0; i < 3; ++i) {
        const int x = tris[t].v[(i + 1) % 3], y = tris[t].v[(i + 2) % 3];
        auto it = open.find(key(y, x));
        if (it != open.end()) {
          tris[t].n[i] = it->second.first;
          tris[it->second.first].n[it->second.second] = t;
          open.erase(it);
        } else {
          open[key(x, y)] = {t, i};
        }
      }
    }
  }

  int locate(int p) {
    int t = last_;
    if (!tris[t].alive) t = 0;
    while (!tris[t].alive) ++t;
    const std::size_t cap = 4 * tris.size() + 64;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& tr = tris[t];
      if (tr.infinite()) {
        const int i = tr.index_of(kInf);
        if (orient_raw(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], p) > 0) return t;
        t = tr.n[i];
        continue;
      }
      const int r = static_cast<int>(walk_rng_() % 3);
      bool moved = false;
      for (int j = 0; j < 3; ++j) {
        const int i = (r + j) % 3;
        if (orient_raw(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], p) < 0) {
          t = tr.n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    // The walk should not cycle; fall back to a scan if it does.
    for (int s = 0; s < static_cast<int>(tris.size()); ++s) {
      const Tri& tr = tris[s];
      if (!tr.alive || tr.infinite()) continue;
      if (orient_raw(tr.v[0], tr.v[1], p) >= 0 && orient_raw(tr.v[1], tr.v[2], p) >= 0 &&
          orient_raw(tr.v[2], tr.v[0], p) >= 0) {
        return s;
      }
    }
    for (int s = 0; s < static_cast<int>(tris.size()); ++s) {
      if (tris[s].alive && tris[s].infinite() && in_conflict(tris[s], p)) return s;
    }
    throw NumericalError("regular_triangulation: point location failed");
  }

  void insert(int p) {
    const int t0 = locate(p);
    if (!in_conflict(tris[t0], p)) {
      hidden[p] = 1;  // lifts above the lower hull
      return;
    }
    std::vector<int> cavity{t0};
    std::vector<std::pair<int, int>> boundary;  // (triangle, corner opposite the edge)
    tris[t0].alive = false;
    for (std::size_t head = 0; head < cavity.size(); ++head) {
      const int t = cavity[head];
      for (int i = 0; i < 3; ++i) {
        const int nb = tris[t].n[i];
        if (!tris[nb].alive) continue;  // already in the cavity
        if (in_conflict(tris[nb], p)) {
          tris[nb].alive = false;
          cavity.push_back(nb);
        } else {
          boundary.emplace_back(t, i);
        }
      }
    }
    // A cavity neighbour that was marked after being seen as boundary would
    // be double counted; recheck the boundary against the final cavity.
    std::erase_if(boundary, [&](const std::pair<int, int>& e) { return !tris[tris[e.first].n[e.second]].alive; });

    std::unordered_map<int, int> starts, ends;
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& [t, i] : boundary) {
      const int a = tris[t].v[(i + 1) % 3];
      const int b = tris[t].v[(i + 2) % 3];
      const int outer = tris[t].n[i];
      Tri nt;
      nt.v = {a, b, p};
      nt.n[2] = outer;
      const int id = static_cast<int>(tris.size());
      tris.push_back(nt);
      for (int j = 0; j < 3; ++j) {
        if (tris[outer].n[j] == t) tris[outer].n[j] = id;
      }
      if (!starts.emplace(a, id).second || !ends.emplace(b, id).second) {
        throw DegeneracyError("regular_triangulation: conflict region is not a disk");
      }
      created.push_back(id);
    }
    for (int id : created) {
      Tri& nt = tris[id];
      auto s = starts.find(nt.v[1]);
      auto e = ends.find(nt.v[0]);
      if (s == starts.end() || e == ends.end()) {
        throw DegeneracyError("regular_triangulation: conflict region boundary is not closed");
      }
      nt.n[0] = s->second;
      nt.n[1] = e->second;
    }
    // Cavity corners that do not reach the boundary are now submerged.
    for (int t : cavity) {
      for (int x : tris[t].v) {
        if (x != kInf && x != p && !starts.count(x)) hidden[x] = 1;
      }
    }
    last_ = created.front();
    for (int id : created) {
      if (!tris[id].infinite()) {
        last_ = id;
        break;
      }
    }
  }
};

inline Eigen::Vector2d power_center(const WeightedPoint& a, const WeightedPoint& b, const WeightedPoint& c) {
  const Eigen::Vector2d ab = b.y.head<2>() - a.y.head<2>();
  const Eigen::Vector2d ac = c.y.head<2>() - a.y.head<2>();
  const double gb = 0.5 * (ab.squaredNorm() - b.w + a.w);
  const double gc = 0.5 * (ac.squaredNorm() - c.w + a.w);
  const double det = ab.x() * ac.y() - ab.y() * ac.x();
  if (det == 0.0) throw DegeneracyError("power_dual: degenerate triangle");
  const Eigen::Vector2d s((gb * ac.y() - gc * ab.y()) / det, (ab.x() * gc - ac.x() * gb) / det);
  return a.y.head<2>() + s;
}

}  // namespace mosaic2d_detail

/// Regular triangulation of weighted points in R^2 (projected lower hull of the lift).
inline RegularTriangulation regular_triangulation(std::vector<WeightedPoint> points) {
  using mosaic2d_detail::kInf;
  RegularTriangulation out;
  out.points = std::move(points);
  mosaic2d_detail::Builder builder(out.points);
  builder.run();

  std::vector<int> vertex_of(out.points.size(), -1);
  for (const auto& t : builder.tris) {
    if (!t.alive || t.infinite()) continue;
    for (int x : t.v) vertex_of[x] = 0;
  }
  for (int i = 0; i < static_cast<int>(out.points.size()); ++i) {
    if (vertex_of[i] == 0) {
      vertex_of[i] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(i);
    } else {
      out.hidden.push_back(i);
    }
  }
  std::vector<int> tri_of(builder.tris.size(), -1);
  for (int t = 0; t < static_cast<int>(builder.tris.size()); ++t) {
    const auto& tr = builder.tris[t];
    if (!tr.alive || tr.infinite()) continue;
    tri_of[t] = static_cast<int>(out.triangles.size());
    out.triangles.push_back({vertex_of[tr.v[0]], vertex_of[tr.v[1]], vertex_of[tr.v[2]]});
  }
  if (out.triangles.empty()) throw DegeneracyError("regular_triangulation: no triangles");
  out.triangle_neighbors.resize(out.triangles.size());
  for (int t = 0; t < static_cast<int>(builder.tris.size()); ++t) {
    if (tri_of[t] < 0) continue;
    for (int i = 0; i < 3; ++i) {
      const int nb = builder.tris[t].n[i];
      out.triangle_neighbors[tri_of[t]][i] = tri_of[nb];
    }
  }

  // Edges, each found from the triangle on its left.
  out.triangle_edges.assign(out.triangles.size(), {-1, -1, -1});
  out.vertex_edges.assign(out.vertices.size(), {});
  for (int t = 0; t < static_cast<int>(out.triangles.size()); ++t) {
    for (int i = 0; i < 3; ++i) {
      if (out.triangle_edges[t][i] >= 0) continue;
      const int a = out.triangles[t][(i + 1) % 3];
      const int b = out.triangles[t][(i + 2) % 3];
      const int nb = out.triangle_neighbors[t][i];
      const int e = static_cast<int>(out.edges.size());
      out.edges.push_back({std::min(a, b), std::max(a, b)});
      out.edge_triangles.push_back(a < b ? std::array<int, 2>{t, nb} : std::array<int, 2>{nb, t});
      out.triangle_edges[t][i] = e;
      if (nb >= 0) {
        for (int j = 0; j < 3; ++j) {
          if (out.triangle_neighbors[nb][j] == t) out.triangle_edges[nb][j] = e;
        }
      }
      out.vertex_edges[a].push_back(e);
      out.vertex_edges[b].push_back(e);
    }
  }
  (void)kInf;
  return out;
}

/// Power diagram dual to a regular triangulation.
inline PowerDiagram power_dual(const RegularTriangulation& t) {
  PowerDiagram d;
  d.vertices.reserve(t.triangles.size());
  for (const auto& tri : t.triangles) {
    d.vertices.push_back(mosaic2d_detail::power_center(t.point(tri[0]), t.point(tri[1]), t.point(tri[2])));
  }
  d.edges.resize(t.edges.size());
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const auto [lo, hi] = t.edges[e];
    const auto [left, right] = t.edge_triangles[e];
    auto& de = d.edges[e];
    const Eigen::Vector2d along = t.position(hi) - t.position(lo);
    if (left >= 0 && right >= 0) {
      de.from = left;
      de.to = right;
      de.direction = (d.vertices[right] - d.vertices[left]).normalized();
    } else {
      de.ray = true;
      de.from = left >= 0 ? left : right;
      // Outward side of the hull edge: right of lo->hi if the triangle is on the left.
      const Eigen::Vector2d normal = left >= 0 ? Eigen::Vector2d(along.y(), -along.x())
                                               : Eigen::Vector2d(-along.y(), along.x());
      de.direction = normal.normalized();
    }
  }
  d.cells.resize(t.vertices.size());
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    auto& cell = d.cells[v];
    cell.edges = t.vertex_edges[v];
    const Eigen::Vector2d yv = t.position(static_cast<int>(v));
    std::vector<std::pair<double, int>> by_angle;
    for (int e : cell.edges) {
      const int u = t.edges[e][0] == static_cast<int>(v) ? t.edges[e][1] : t.edges[e][0];
      const Eigen::Vector2d dir = t.position(u) - yv;
      by_angle.emplace_back(std::atan2(dir.y(), dir.x()), e);
      if (t.on_hull(e)) cell.bounded = false;
    }
    std::sort(by_angle.begin(), by_angle.end());
    for (std::size_t i = 0; i < by_angle.size(); ++i) cell.edges[i] = by_angle[i].second;
    // The diagram vertex between consecutive edges is the triangle they share.
    for (std::size_t i = 0; i < cell.edges.size(); ++i) {
      const int e1 = cell.edges[i];
      const int e2 = cell.edges[(i + 1) % cell.edges.size()];
      for (int a : t.edge_triangles[e1]) {
        if (a < 0) continue;
        if (a == t.edge_triangles[e2][0] || a == t.edge_triangles[e2][1]) {
          cell.vertices.push_back(a);
          break;
        }
      }
    }
  }
  return d;
}

/// Annotated k=2 mosaic: triangulation, diagram, radius function, intervals.
struct Mosaic2D {
  struct SimplexData {
    double radius = 0.0;
    Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
    int interval = -1;
  };

  RegularTriangulation tri;
  PowerDiagram diagram;
  std::vector<SimplexData> vertex_data, edge_data, triangle_data;
  std::vector<Interval> intervals;

  const SimplexData& data(SimplexId s) const {
    return s.dim == 0 ? vertex_data[s.index] : (s.dim == 1 ? edge_data[s.index] : triangle_data[s.index]);
  }
  SimplexData& data(SimplexId s) {
    return s.dim == 0 ? vertex_data[s.index] : (s.dim == 1 ? edge_data[s.index] : triangle_data[s.index]);
  }
  std::size_t simplex_count(int dim) const {
    return dim == 0 ? tri.vertices.size() : (dim == 1 ? tri.edges.size() : tri.triangles.size());
  }
  /// Triangulation vertex indices of a simplex, ascending.
  std::vector<int> corners(SimplexId s) const {
    std::vector<int> c;
    if (s.dim == 0) c = {s.index};
    else if (s.dim == 1) c = {tri.edges[s.index][0], tri.edges[s.index][1]};
    else c = {tri.triangles[s.index][0], tri.triangles[s.index][1], tri.triangles[s.index][2]};
    std::sort(c.begin(), c.end());
    return c;
  }
  std::vector<WeightedPoint> weighted_corners(SimplexId s) const {
    std::vector<WeightedPoint> out;
    for (int v : corners(s)) out.push_back(tri.point(v));
    return out;
  }
};

namespace mosaic2d_detail {

inline bool spheres_match(const Mosaic2D::SimplexData& a, const Mosaic2D::SimplexData& b, double diameter, double tol) {
  return (a.anchor - b.anchor).norm() <= tol * std::max(diameter, 1e-300) &&
         std::abs(a.radius - b.radius) <= tol * std::max(a.radius, b.radius);
}

}  // namespace mosaic2d_detail

/// Radius function and interval decomposition of a k=2 slice mosaic.
///
/// Each simplex's squared radius is the minimum of the power of one of its
/// generators over its dual face: a point for triangles, a clamped quadratic
/// on a segment or ray for edges, and for vertices either the generator's own
/// projection (if it lies in its cell) or the minimum over the cell's edges.
/// The face where the minimum is attained names the upper bound of the
/// interval. Sphere sharing and visibility typing are both checked.
inline Mosaic2D radius_and_intervals_2d(RegularTriangulation t, PowerDiagram d, std::span<const PointN> cloud = {},
                                        double rel_tol = 1e-9) {
  (void)cloud;  // the triangulation carries the preimages of its generators
  Mosaic2D m;
  m.tri = std::move(t);
  m.diagram = std::move(d);
  const auto& tr = m.tri;
  const auto& dg = m.diagram;
  m.vertex_data.resize(tr.vertices.size());
  m.edge_data.resize(tr.edges.size());
  m.triangle_data.resize(tr.triangles.size());

  // owner[s] = the simplex whose dual face carries the argmin.
  std::vector<SimplexId> v_owner(tr.vertices.size()), e_owner(tr.edges.size());

  for (std::size_t i = 0; i < tr.triangles.size(); ++i) {
    auto& sd = m.triangle_data[i];
    sd.anchor = dg.vertices[i];
    const auto& g = tr.point(tr.triangles[i][0]);
    sd.radius = std::sqrt(std::max(0.0, (sd.anchor - g.y.head<2>()).squaredNorm() - g.w));
  }

  for (std::size_t e = 0; e < tr.edges.size(); ++e) {
    const WeightedPoint pair[2] = {tr.point(tr.edges[e][0]), tr.point(tr.edges[e][1])};
    const AnchoredSphere free = smallest_anchored_circumsphere(std::span<const WeightedPoint>(pair), rel_tol);
    const Eigen::Vector2d zstar = free.anchor.head<2>();
    const auto& de = dg.edges[e];
    const Eigen::Vector2d c1 = dg.vertices[de.from];
    auto& sd = m.edge_data[e];
    const double scale = std::max({1.0, (pair[1].y - pair[0].y).norm(), free.radius});
    SimplexId owner{1, static_cast<int>(e)};
    if (de.ray) {
      const double tpar = (zstar - c1).dot(de.direction);
      if (std::abs(tpar) < rel_tol * scale) throw ToleranceError("radius_and_intervals_2d: edge anchor at a diagram vertex");
      if (tpar <= 0.0) {
        sd.anchor = c1;
        owner = {2, de.from};
      } else {
        sd.anchor = c1 + tpar * de.direction;
      }
    } else {
      const Eigen::Vector2d c2 = dg.vertices[de.to];
      const Eigen::Vector2d seg = c2 - c1;
      const double len2 = seg.squaredNorm();
      if (!(len2 > 0.0)) throw DegeneracyError("radius_and_intervals_2d: zero-length dual edge");
      const double tpar = (zstar - c1).dot(seg) / len2;
      const double len = std::sqrt(len2);
      if (std::abs(tpar) * len < rel_tol * scale || std::abs(1.0 - tpar) * len < rel_tol * scale) {
        throw ToleranceError("radius_and_intervals_2d: edge anchor at a diagram vertex");
      }
      if (tpar <= 0.0) {
        sd.anchor = c1;
        owner = {2, de.from};
      } else if (tpar >= 1.0) {
        sd.anchor = c2;
        owner = {2, de.to};
      } else {
        sd.anchor = c1 + tpar * seg;
      }
    }
    sd.radius = std::sqrt(std::max(0.0, (sd.anchor - pair[0].y.head<2>()).squaredNorm() - pair[0].w));
    e_owner[e] = owner;
  }

  for (std::size_t v = 0; v < tr.vertices.size(); ++v) {
    const auto& g = tr.point(static_cast<int>(v));
    const Eigen::Vector2d yv = g.y.head<2>();
    bool inside = true;
    for (int e : tr.vertex_edges[v]) {
      const int u = tr.edges[e][0] == static_cast<int>(v) ? tr.edges[e][1] : tr.edges[e][0];
      const auto& gu = tr.point(u);
      const double own = -g.w;
      const double other = (yv - gu.y.head<2>()).squaredNorm() - gu.w;
      if (std::abs(other - own) < rel_tol * std::max(1.0, std::abs(own))) {
        throw ToleranceError("radius_and_intervals_2d: generator projects onto its cell boundary");
      }
      if (other < own) inside = false;
    }
    auto& sd = m.vertex_data[v];
    if (inside) {
      sd.anchor = yv;
      sd.radius = std::sqrt(std::max(0.0, -g.w));
      v_owner[v] = {0, static_cast<int>(v)};
      continue;
    }
    int best = -1;
    for (int e : tr.vertex_edges[v]) {
      if (best < 0 || m.edge_data[e].radius < m.edge_data[best].radius) best = e;
    }
    for (int e : tr.vertex_edges[v]) {
      if (e == best || e_owner[e] == e_owner[best]) continue;
      // Radii separate quadratically in the anchor offset, so only a gap at
      // rounding level is a real tie; anchors near a shared corner were caught above.
      if (std::abs(m.edge_data[e].radius - m.edge_data[best].radius) < 1e-14 * std::max(1.0, m.edge_data[best].radius)) {
        throw ToleranceError("radius_and_intervals_2d: two cell edges tie for the nearest point");
      }
    }
    sd.anchor = m.edge_data[best].anchor;
    sd.radius = std::sqrt(std::max(0.0, (sd.anchor - yv).squaredNorm() - g.w));
    v_owner[v] = e_owner[best];
  }

  // Group by owner.
  std::vector<int> tri_interval(tr.triangles.size(), -1), edge_interval(tr.edges.size(), -1),
      vert_interval(tr.vertices.size(), -1);
  auto interval_of = [&](SimplexId owner) -> int& {
    return owner.dim == 0 ? vert_interval[owner.index]
                          : (owner.dim == 1 ? edge_interval[owner.index] : tri_interval[owner.index]);
  };
  auto add_member = [&](SimplexId s, SimplexId owner) {
    int& id = interval_of(owner);
    if (id < 0) {
      id = static_cast<int>(m.intervals.size());
      Interval iv;
      iv.upper = owner;
      iv.lower = owner;
      m.intervals.push_back(iv);
    }
    auto& iv = m.intervals[id];
    iv.members.push_back(s);
    if (s.dim < iv.lower.dim) iv.lower = s;
    m.data(s).interval = id;
  };
  for (std::size_t i = 0; i < tr.triangles.size(); ++i) add_member({2, static_cast<int>(i)}, {2, static_cast<int>(i)});
  for (std::size_t e = 0; e < tr.edges.size(); ++e) add_member({1, static_cast<int>(e)}, e_owner[e]);
  for (std::size_t v = 0; v < tr.vertices.size(); ++v) add_member({0, static_cast<int>(v)}, v_owner[v]);

  for (auto& iv : m.intervals) {
    std::sort(iv.members.begin(), iv.members.end());
    iv.type = {iv.lower.dim, iv.upper.dim};
    const auto up = m.data(iv.upper);
    const auto corners = m.weighted_corners(iv.upper);
    const double diam = std::max(geometry_detail::diameter(corners), 1.0);
    for (auto s : iv.members) {
      if (!mosaic2d_detail::spheres_match(m.data(s), up, diam, 1e-7)) {
        throw ToleranceError("radius_and_intervals_2d: interval members do not share a sphere");
      }
    }
    iv.sphere.anchor = up.anchor;
    iv.sphere.radius = up.radius;
    if (iv.members.size() != (std::size_t{1} << (iv.type.m - iv.type.ell))) {
      throw ToleranceError("radius_and_intervals_2d: interval has the wrong number of members");
    }
    const IntervalType seen = visibility_type(iv.sphere, corners, rel_tol);
    if (seen != iv.type) throw ToleranceError("radius_and_intervals_2d: sphere grouping disagrees with visibility");
    // Members share the interval's sphere exactly from here on.
    for (auto s : iv.members) {
      m.data(s).anchor = up.anchor;
      m.data(s).radius = up.radius;
    }
  }
  // Faces of different intervals must not share a sphere either.
  for (std::size_t e = 0; e < tr.edges.size(); ++e) {
    const double diam = std::max((tr.position(tr.edges[e][0]) - tr.position(tr.edges[e][1])).norm(), 1.0);
    for (int tt : tr.edge_triangles[e]) {
      if (tt < 0 || tri_interval[tt] == m.edge_data[e].interval) continue;
      if (mosaic2d_detail::spheres_match(m.edge_data[e], m.triangle_data[tt], diam, rel_tol)) {
        throw ToleranceError("radius_and_intervals_2d: edge and triangle spheres coincide across intervals");
      }
    }
    for (int v : tr.edges[e]) {
      if (m.vertex_data[v].interval == m.edge_data[e].interval) continue;
      if (mosaic2d_detail::spheres_match(m.vertex_data[v], m.edge_data[e], diam, rel_tol)) {
        throw ToleranceError("radius_and_intervals_2d: vertex and edge spheres coincide across intervals");
      }
    }
  }
  return m;
}

inline Mosaic2D build_2d(std::span<const PointN> cloud, double rel_tol = 1e-9) {
  auto tri = regular_triangulation(project_to_slice(cloud, 2));
  auto dia = power_dual(tri);
  return radius_and_intervals_2d(std::move(tri), std::move(dia), cloud, rel_tol);
}

/// Exhaustive structural audit of an annotated 2D mosaic against its cloud.
inline AuditReport audit_2d(const Mosaic2D& m, std::span<const PointN> cloud) {
  AuditReport rep;
  const auto& tr = m.tri;
  // Lower-hull certificate against every input point, hidden ones included.
  for (std::size_t t = 0; t < tr.triangles.size(); ++t) {
    ++rep.checks;
    const auto& c = tr.triangles[t];
    const Eigen::Vector3d a = tr.lifted(c[0]), b = tr.lifted(c[1]), cc = tr.lifted(c[2]);
    Eigen::Vector3d normal = (b - a).cross(cc - a);
    if (normal.z() <= 0.0) {
      rep.fail("triangle " + std::to_string(t) + " is not counter-clockwise");
      continue;
    }
    const double scale = std::max({1.0, std::abs(a.z()), std::abs(b.z()), std::abs(cc.z())});
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
      const auto& p = tr.points[i];
      const Eigen::Vector3d q(p.y[0], p.y[1], p.y.squaredNorm() - p.w);
      // Height of the plane above q's projection.
      const double plane = a.z() - (normal.x() * (q.x() - a.x()) + normal.y() * (q.y() - a.y())) / normal.z();
      if (q.z() < plane - 1e-9 * scale) {
        rep.fail("point " + std::to_string(i) + " lies below the lifted plane of triangle " + std::to_string(t));
        break;
      }
    }
  }
  // Partition and interval structure.
  std::vector<int> count[3] = {std::vector<int>(tr.vertices.size(), 0), std::vector<int>(tr.edges.size(), 0),
                               std::vector<int>(tr.triangles.size(), 0)};
  for (std::size_t id = 0; id < m.intervals.size(); ++id) {
    const auto& iv = m.intervals[id];
    ++rep.checks;
    const std::string tag = "interval " + std::to_string(id);
    if (iv.members.size() != (std::size_t{1} << (iv.type.m - iv.type.ell))) rep.fail(tag + " has wrong member count");
    const auto lo = m.corners(iv.lower);
    const auto up = m.corners(iv.upper);
    if (!std::includes(up.begin(), up.end(), lo.begin(), lo.end())) rep.fail(tag + ": lower bound is not a face of the upper bound");
    for (auto s : iv.members) {
      ++count[s.dim][s.index];
      const auto c = m.corners(s);
      if (!std::includes(c.begin(), c.end(), lo.begin(), lo.end()) || !std::includes(up.begin(), up.end(), c.begin(), c.end())) {
        rep.fail(tag + " has a member outside [L, U]");
      }
      if (m.data(s).interval != static_cast<int>(id)) rep.fail(tag + " member points to another interval");
    }
  }
  for (int dim = 0; dim < 3; ++dim) {
    for (std::size_t i = 0; i < count[dim].size(); ++i) {
      ++rep.checks;
      if (count[dim][i] != 1) {
        rep.fail("simplex (" + std::to_string(dim) + "," + std::to_string(i) + ") lies in " + std::to_string(count[dim][i]) +
                 " intervals");
      }
    }
  }
  // Radius monotonicity.
  for (std::size_t e = 0; e < tr.edges.size(); ++e) {
    ++rep.checks;
    const double r = m.edge_data[e].radius;
    for (int v : tr.edges[e]) {
      if (m.vertex_data[v].radius > r * (1.0 + 1e-12)) rep.fail("edge " + std::to_string(e) + " is smaller than a vertex");
    }
  }
  for (std::size_t t = 0; t < tr.triangles.size(); ++t) {
    ++rep.checks;
    const double r = m.triangle_data[t].radius;
    for (int e : tr.triangle_edges[t]) {
      if (m.edge_data[e].radius > r * (1.0 + 1e-12)) rep.fail("triangle " + std::to_string(t) + " is smaller than an edge");
    }
  }
  // Emptiness of every anchored sphere with respect to the R^n cloud.
  auto check_empty = [&](const Mosaic2D::SimplexData& sd, const std::string& what) {
    ++rep.checks;
    const double limit = sd.radius - 1e-9 * std::max(1.0, sd.radius);
    if (limit <= 0.0) return;
    const double lim2 = limit * limit;
    for (const auto& x : cloud) {
      double d2 = 0.0;
      for (int i = 0; i < x.dim(); ++i) {
        const double c = i < 2 ? x[i] - sd.anchor[i] : x[i];
        d2 += c * c;
      }
      if (d2 < lim2) {
        rep.fail(what + " has a non-empty anchored sphere");
        return;
      }
    }
  };
  for (std::size_t i = 0; i < m.vertex_data.size(); ++i) check_empty(m.vertex_data[i], "vertex " + std::to_string(i));
  for (std::size_t i = 0; i < m.edge_data.size(); ++i) check_empty(m.edge_data[i], "edge " + std::to_string(i));
  for (std::size_t i = 0; i < m.triangle_data.size(); ++i) check_empty(m.triangle_data[i], "triangle " + std::to_string(i));
  return rep;
}

}  // namespace anchormosaic
