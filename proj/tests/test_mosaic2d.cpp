#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "anchormosaic/mosaic2d.hpp"
#include "anchormosaic/sampler.hpp"

using namespace anchormosaic;

namespace {

std::vector<PointN> random_cloud(std::mt19937_64& g, int count, int n, double side, double depth) {
  std::uniform_real_distribution<double> ux(0.0, side), uz(-depth, depth);
  std::vector<PointN> pts;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x(n);
    x[0] = ux(g);
    x[1] = ux(g);
    for (int j = 2; j < n; ++j) x[j] = uz(g);
    pts.emplace_back(std::move(x));
  }
  return pts;
}

WeightedPoint wp(double x, double y, double w) {
  WeightedPoint p;
  p.y = Eigen::Vector2d(x, y);
  p.w = w;
  return p;
}

double min_power(const std::vector<WeightedPoint>& pts, const Eigen::Vector2d& z) {
  double best = INFINITY;
  for (const auto& p : pts) best = std::min(best, power_distance(z, p));
  return best;
}

}  // namespace

TEST(Mosaic2D, SingleTriangle) {
  const auto t = regular_triangulation({wp(0, 0, -1), wp(4, 0, -1), wp(2, 3, -1)});
  ASSERT_EQ(t.triangles.size(), 1u);
  EXPECT_EQ(t.edges.size(), 3u);
  EXPECT_TRUE(t.hidden.empty());
  const auto d = power_dual(t);
  ASSERT_EQ(d.vertices.size(), 1u);
  for (const auto& e : d.edges) EXPECT_TRUE(e.ray);
  for (const auto& c : d.cells) EXPECT_FALSE(c.bounded);
}

TEST(Mosaic2D, EqualWeightsGiveDelaunay) {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<WeightedPoint> pts;
    for (int i = 0; i < 150; ++i) pts.push_back(wp(u(g), u(g), -0.5));
    const auto t = regular_triangulation(pts);
    EXPECT_TRUE(t.hidden.empty());
    for (const auto& c : t.triangles) {
      const Eigen::Vector2d a = t.position(c[0]), b = t.position(c[1]), cc = t.position(c[2]);
      // circumcentre from the perpendicular bisectors
      Eigen::Matrix2d M;
      M.row(0) = 2.0 * (b - a).transpose();
      M.row(1) = 2.0 * (cc - a).transpose();
      const Eigen::Vector2d rhs(b.squaredNorm() - a.squaredNorm(), cc.squaredNorm() - a.squaredNorm());
      const Eigen::Vector2d centre = M.colPivHouseholderQr().solve(rhs);
      const double r2 = (centre - a).squaredNorm();
      for (const auto& p : pts) EXPECT_GE((p.y - centre).squaredNorm(), r2 * (1.0 - 1e-9));
    }
    // Euler for a triangulated convex region: V - E + F = 1
    EXPECT_EQ(static_cast<long>(t.vertices.size()) - static_cast<long>(t.edges.size()) +
                  static_cast<long>(t.triangles.size()),
              1);
  }
}

TEST(Mosaic2D, PowerDiagramIsDual) {
  std::mt19937_64 g(22);
  const auto cloud = random_cloud(g, 300, 4, 12.0, 1.0);
  const auto wps = project_to_slice(std::span<const PointN>(cloud), 2);
  const auto t = regular_triangulation(wps);
  const auto d = power_dual(t);
  ASSERT_EQ(d.vertices.size(), t.triangles.size());
  ASSERT_EQ(d.edges.size(), t.edges.size());
  ASSERT_EQ(d.cells.size(), t.vertices.size());
  for (std::size_t i = 0; i < t.triangles.size(); ++i) {
    const auto& c = t.triangles[i];
    const double p0 = power_distance(d.vertices[i], t.point(c[0]));
    const double scale = std::max(1.0, std::abs(p0));
    EXPECT_NEAR(power_distance(d.vertices[i], t.point(c[1])), p0, 1e-8 * scale);
    EXPECT_NEAR(power_distance(d.vertices[i], t.point(c[2])), p0, 1e-8 * scale);
    EXPECT_GE(min_power(wps, d.vertices[i]), p0 - 1e-8 * scale);
  }
  // a point inside each bounded cell belongs to that generator
  for (std::size_t v = 0; v < d.cells.size(); ++v) {
    const auto& cell = d.cells[v];
    if (!cell.bounded || cell.vertices.empty()) continue;
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int dv : cell.vertices) c += d.vertices[dv];
    c /= static_cast<double>(cell.vertices.size());
    EXPECT_LE(power_distance(c, t.point(static_cast<int>(v))), min_power(wps, c) + 1e-8);
  }
}

TEST(Mosaic2D, HiddenPointsAreSubmerged) {
  // A point far from the plane (very negative w) inside a triangle has an empty cell.
  const auto t = regular_triangulation({wp(0, 0, 0), wp(10, 0, 0), wp(5, 8, 0), wp(5, 3, 0.0)});
  EXPECT_EQ(t.vertices.size(), 4u);
  const auto s = regular_triangulation({wp(0, 0, 0), wp(10, 0, 0), wp(5, 8, 0), wp(5, 3, -100.0)});
  EXPECT_EQ(s.vertices.size(), 3u);
  ASSERT_EQ(s.hidden.size(), 1u);
  EXPECT_EQ(s.hidden[0], 3);
}

TEST(Mosaic2D, AuditCleanOnRandomInstances) {
  std::mt19937_64 g(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 3;
    const auto cloud = random_cloud(g, 20 + 10 * trial, n, 10.0, 1.5);
    const auto m = build_2d(cloud);
    const auto a = audit_2d(m, cloud);
    EXPECT_TRUE(a.ok()) << "trial " << trial << ": " << (a.violations.empty() ? "" : a.violations.front());
    EXPECT_GT(a.checks, 0);
  }
}

TEST(Mosaic2D, IntervalCountsReconcile) {
  std::mt19937_64 g(24);
  const auto cloud = random_cloud(g, 500, 3, 15.0, 2.0);
  const auto m = build_2d(cloud);
  long c[3][3] = {};
  for (const auto& iv : m.intervals) ++c[iv.type.ell][iv.type.m];
  // each simplex sits in exactly one interval
  long per_dim[3] = {};
  for (int ell = 0; ell <= 2; ++ell) {
    for (int mm = ell; mm <= 2; ++mm) {
      for (int j = ell; j <= mm; ++j) per_dim[j] += static_cast<long>(binomial(mm - ell, mm - j)) * c[ell][mm];
    }
  }
  EXPECT_EQ(per_dim[0], static_cast<long>(m.tri.vertices.size()));
  EXPECT_EQ(per_dim[1], static_cast<long>(m.tri.edges.size()));
  EXPECT_EQ(per_dim[2], static_cast<long>(m.tri.triangles.size()));
  // the radius function is a discrete Morse function: critical counts obey Euler
  EXPECT_EQ(c[0][0] - c[1][1] + c[2][2], 1);
}

TEST(Mosaic2D, RadiiAreMinimalPowers) {
  std::mt19937_64 g(25);
  const auto cloud = random_cloud(g, 200, 3, 10.0, 1.0);
  const auto m = build_2d(cloud);
  for (std::size_t e = 0; e < m.tri.edges.size(); ++e) {
    const auto& sd = m.edge_data[e];
    for (int v : m.tri.edges[e]) {
      EXPECT_NEAR(power_distance(sd.anchor, m.tri.point(v)), sd.radius * sd.radius, 1e-7 * std::max(1.0, sd.radius * sd.radius));
    }
    // the smallest circumsphere of the two preimages is a lower bound
    const auto s = smallest_anchored_circumsphere(std::span<const WeightedPoint>(m.weighted_corners({1, static_cast<int>(e)})));
    EXPECT_GE(sd.radius, s.radius * (1.0 - 1e-9));
  }
  for (std::size_t v = 0; v < m.tri.vertices.size(); ++v) {
    const auto& sd = m.vertex_data[v];
    EXPECT_GE(sd.radius * sd.radius, -m.tri.point(static_cast<int>(v)).w * (1.0 - 1e-12));
  }
}

TEST(Mosaic2D, ScaleEquivariance) {
  std::mt19937_64 g(26);
  auto cloud = random_cloud(g, 250, 3, 10.0, 1.0);
  const auto a = build_2d(cloud);
  for (auto& p : cloud) p.coords *= 2.0;
  const auto b = build_2d(cloud);
  ASSERT_EQ(a.intervals.size(), b.intervals.size());
  std::vector<double> ra, rb;
  long ta[3][3] = {}, tb[3][3] = {};
  for (const auto& iv : a.intervals) ra.push_back(iv.sphere.radius), ++ta[iv.type.ell][iv.type.m];
  for (const auto& iv : b.intervals) rb.push_back(iv.sphere.radius), ++tb[iv.type.ell][iv.type.m];
  std::sort(ra.begin(), ra.end());
  std::sort(rb.begin(), rb.end());
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_NEAR(rb[i], 2.0 * ra[i], 1e-9 * rb[i]);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(ta[i][j], tb[i][j]);
  }
}

TEST(Mosaic2D, EmptySpheresAgainstAmbientCloud) {
  SamplingConfig cfg;
  cfg.n = 3;
  cfg.k = 2;
  cfg.window = Box::cube(2, 12.0);
  cfg.buffer = 2.5;
  cfg.seed = 17;
  const auto cloud = sample_poisson_box(cfg);
  const auto m = build_2d(cloud);
  int checked = 0;
  for (const auto& iv : m.intervals) {
    if (!cfg.window.contains(iv.sphere.anchor)) continue;
    EXPECT_TRUE(sphere_is_empty(iv.sphere, std::span<const PointN>(cloud)));
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Mosaic2D, DegenerateInput) {
  EXPECT_THROW(regular_triangulation({wp(0, 0, 0), wp(1, 1, 0), wp(2, 2, 0)}), DegeneracyError);
  EXPECT_THROW(regular_triangulation({wp(0, 0, 0), wp(1, 0, 0)}), DomainError);
  EXPECT_THROW(regular_triangulation({wp(0, 0, 0), wp(0, 0, 0), wp(1, 0, 0), wp(0, 1, 0)}), DegeneracyError);
}
