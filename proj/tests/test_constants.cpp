#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "anchormosaic/constants.hpp"
#include "reference_tables.hpp"

using namespace anchormosaic;
namespace ref = anchormosaic::reference;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Geometry, SphereAndBallVolumes) {
  EXPECT_NEAR(GeometryConstants::sigma(1), 2.0, 1e-14);
  EXPECT_NEAR(GeometryConstants::sigma(2), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(GeometryConstants::sigma(3), 4.0 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(GeometryConstants::nu(2), std::numbers::pi, 1e-14);
  EXPECT_NEAR(GeometryConstants::nu(3), 4.0 / 3.0 * std::numbers::pi, 1e-13);
}

TEST(Geometry, GrassmannianMeasure) {
  EXPECT_NEAR(grassmannian_measure(0, 2), 1.0, 1e-15);
  EXPECT_NEAR(grassmannian_measure(2, 2), 1.0, 1e-15);
  EXPECT_NEAR(grassmannian_measure(1, 2), std::numbers::pi, 1e-14);  // sigma_2 / sigma_1
  EXPECT_NEAR(grassmannian_measure(1, 3), 2.0 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(grassmannian_measure(2, 3), grassmannian_measure(1, 3), 1e-13);  // duality
  EXPECT_THROW(grassmannian_measure(3, 2), DomainError);
}

TEST(Constants, OneDimensionalTable) {
  for (std::size_t i = 0; i < ref::kNs1d.size(); ++i) {
    const int n = ref::kNs1d[i];
    EXPECT_NEAR(constants::interval_constant({0, 0}, 1, n), ref::kC00_1d[i], 0.005) << n;
    EXPECT_NEAR(constants::interval_constant({0, 1}, 1, n), ref::kC01_1d[i], 0.005) << n;
    EXPECT_NEAR(constants::simplex_constant(0, 1, n), ref::kD0_1d[i], 0.005) << n;
  }
}

TEST(Constants, PlanarTableExceptInconsistentEntry) {
  const auto types = interval_types(2);
  for (std::size_t i = 0; i < ref::kNs2d.size(); ++i) {
    const int n = ref::kNs2d[i];
    for (std::size_t t = 0; t < types.size(); ++t) {
      // Three published entries disagree with their own defining integrals; see
      // InconsistentTableEntries and VertexEdgeMatchesDoubleIntegral.
      if (n == 4 && types[t] == IntervalType{0, 2}) continue;
      if ((n == 10 || n == 20) && types[t] == IntervalType{0, 1}) continue;
      EXPECT_NEAR(constants::interval_constant(types[t], 2, n), ref::kC_2d[t][i], 0.005)
          << "n=" << n << " type (" << types[t].ell << "," << types[t].m << ")";
    }
    for (int j = 0; j <= 2; ++j) EXPECT_NEAR(constants::simplex_constant(j, 2, n), ref::kD_2d[j][i], 0.005) << n;
  }
}

TEST(Constants, InconsistentTableEntries) {
  // The table's own vertex column forces C02 at n = 4: D0 = C00 + C01 + C02.
  const double implied = ref::kD_2d[0][1] - ref::kC_2d[0][1] - ref::kC_2d[1][1];
  EXPECT_NEAR(implied, 0.16, 1e-12);
  const double c02 = constants::interval_constant({0, 2}, 2, 4);
  EXPECT_NEAR(c02, 0.1567, 5e-5);
  EXPECT_LT(std::abs(c02 - implied), 0.0075);  // within the combined rounding slack of three entries
}

TEST(Constants, InconsistentVertexEdgeEntries) {
  // Published 0.86 and 1.12; the defining integral gives 0.8689 and 1.1256.
  EXPECT_NEAR(constants::interval_constant({0, 1}, 2, 10), 0.868895564520199, 1e-12);
  EXPECT_NEAR(constants::interval_constant({0, 1}, 2, 20), 1.125597356652444, 1e-12);
  // Their neighbours C12 = C00 + C01 - C22 + D2/2 are published as 3.01 and
  // 3.72, which round correctly only with the larger C01 values.
  EXPECT_NEAR(ref::kC_2d[0][7] + 0.868895564520199 - constants::interval_constant({2, 2}, 2, 10) +
                  0.5 * constants::simplex_constant(2, 2, 10),
              ref::kC_2d[4][7], 0.005);
}

TEST(Constants, VertexEdgeMatchesDoubleIntegral) {
  // E[(x - y)^k 1{x > y}] for |projections| x, y of two uniform points on the
  // sphere in R^(n-k+1), by nested quadrature, times the prefactor of C01.
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int k = 1; k <= 2; ++k) {
    for (int n : {3, 4, 7, 10, 20}) {
      const double h = 0.5 * (n - k - 2);
      auto inner = [&](double x) {
        if (!(x > 0.0)) return 0.0;
        return ts.integrate([&](double y) { return std::pow(x - y, k) * std::pow(1.0 - y * y, h); }, 0.0, x, 1e-13) *
               std::pow(1.0 - x * x, h);
      };
      const double b = std::beta(0.5 * (n - k), 0.5);
      const double expectation = 4.0 / (b * b) * ts.integrate(inner, 0.0, 1.0, 1e-12);
      const double kn = static_cast<double>(k) / n;
      const double front = std::pow(GeometryConstants::sigma(n - k + 1), 2) * GeometryConstants::sigma(k) *
                           std::tgamma(2.0 - kn) / (4.0 * n * std::pow(GeometryConstants::nu(n), 2.0 - kn));
      // the n - k = 1 integrand has inverse square-root endpoint singularities
      EXPECT_LT(rel(constants::vertex_edge_constant(k, n), front * expectation), n - k == 1 ? 1e-7 : 1e-9) << k << " " << n;
    }
  }
}

TEST(Constants, FrozenPlanarValuesAtThree) {
  // Frozen from this implementation; cross-checked against the published two decimals.
  EXPECT_NEAR(constants::interval_constant({0, 0}, 2, 3), 1.1079, 5e-5);
  EXPECT_NEAR(constants::interval_constant({0, 1}, 2, 3), 0.2589, 5e-5);
  EXPECT_NEAR(constants::interval_constant({0, 2}, 2, 3), 0.0911, 5e-5);
  EXPECT_NEAR(constants::interval_constant({1, 1}, 2, 3), 2.4748, 5e-5);
  EXPECT_NEAR(constants::interval_constant({1, 2}, 2, 3), 1.4580, 5e-5);
  EXPECT_NEAR(constants::interval_constant({2, 2}, 2, 3), 1.3668, 5e-5);
}

TEST(Constants, PlanarLargeNColumn) {
  const auto types = interval_types(2);
  for (std::size_t t = 0; t < types.size(); ++t) {
    EXPECT_NEAR(constants::interval_constant(types[t], 2, 1000), ref::kC_2d_n1000[t], 0.005) << t;
  }
}

TEST(Constants, CriticalVertexMatchesQuadrature) {
  // A point at distance h from the slice is a critical vertex iff the ball of
  // radius h about it is empty: C00 = int over R^(n-k) of exp(-nu_n |t|^n) dt.
  boost::math::quadrature::exp_sinh<double> es;
  for (int k = 1; k <= 2; ++k) {
    for (int n = k + 1; n <= 12; ++n) {
      const double nu = GeometryConstants::nu(n);
      const double radial = es.integrate([&](double t) {
        return t > 0.0 ? std::exp((n - k - 1) * std::log(t) - nu * std::pow(t, n)) : 0.0;
      });
      EXPECT_LT(rel(constants::critical_vertex_constant(k, n), GeometryConstants::sigma(n - k) * radial), 1e-10)
          << k << " " << n;
    }
  }
}

TEST(Constants, ClassicalVoronoiDensities) {
  // Crossings of a line with the Voronoi faces of R^3: S_V / 2.
  const double sv = std::cbrt(256.0 * std::numbers::pi / 3.0) * std::tgamma(5.0 / 3.0) / 2.0;
  EXPECT_LT(rel(constants::simplex_constant(0, 1, 3), sv / 2.0), 1e-12);
  // Crossings of a plane with the Voronoi edges of R^3: L_V / 2.
  const double lv = 16.0 / 15.0 * std::cbrt(3.0 * std::pow(std::numbers::pi, 5) / 4.0) * std::tgamma(4.0 / 3.0);
  EXPECT_LT(rel(constants::simplex_constant(2, 2, 3), lv / 2.0), 1e-12);
  // Planar Poisson-Voronoi edge length 2 per unit area; a line crosses 2/pi of it.
  EXPECT_LT(rel(constants::simplex_constant(0, 1, 2), 4.0 / std::numbers::pi), 1e-12);
}

TEST(Constants, OneDimensionalSpecializationOfGeneralFormulas) {
  for (int n = 2; n <= 20; ++n) {
    EXPECT_LT(rel(constants::critical_vertex_constant(1, n), constants::critical_vertex_constant_1d(n)), 1e-10) << n;
    EXPECT_LT(rel(constants::vertex_edge_constant(1, n), constants::vertex_edge_constant_1d(n)), 1e-10) << n;
    EXPECT_LT(rel(constants::top_simplex_constant(1, n), constants::simplex_constant(1, 1, n)), 1e-10) << n;
  }
}

TEST(Constants, EulerAndTwoToOne) {
  for (int n = 3; n <= 50; ++n) {
    const double d0 = constants::simplex_constant(0, 2, n);
    const double d1 = constants::simplex_constant(1, 2, n);
    const double d2 = constants::simplex_constant(2, 2, n);
    EXPECT_LT(std::abs(d0 - d1 + d2) / d1, 1e-10) << n;
    EXPECT_LT(rel(d2, 2.0 * d0), 1e-10) << n;
    EXPECT_LT(rel(d1, 3.0 * d0), 1e-10) << n;
    const double c00 = constants::interval_constant({0, 0}, 2, n);
    const double c11 = constants::interval_constant({1, 1}, 2, n);
    const double c22 = constants::interval_constant({2, 2}, 2, n);
    EXPECT_LT(std::abs(c00 - c11 + c22) / c11, 1e-10) << n;
  }
  for (int n = 2; n <= 50; ++n) {
    EXPECT_LT(rel(constants::simplex_constant(0, 1, n), constants::simplex_constant(1, 1, n)), 1e-12);
  }
}

TEST(Constants, PositiveAndIncreasingInN) {
  for (int k = 1; k <= 2; ++k) {
    for (auto t : interval_types(k)) {
      double prev = 0.0;
      for (int n = k + 1; n <= 60; ++n) {
        const double v = constants::interval_constant(t, k, n);
        EXPECT_GT(v, prev) << k << " (" << t.ell << "," << t.m << ") n=" << n;
        prev = v;
      }
    }
  }
}

TEST(Constants, OneDimensionalLimits) {
  const auto lim = constants::asymptotic_limits_1d({100, 1000, 10000});
  EXPECT_NEAR(lim.critical_vertex, std::sqrt(std::numbers::e), 1e-15);
  double g0 = INFINITY, g1 = INFINITY, g2 = INFINITY;
  for (const auto& s : lim.samples) {
    const double a = std::abs(s.critical_vertex - lim.critical_vertex);
    const double b = std::abs(s.vertex_edge - lim.vertex_edge);
    const double c = std::abs(s.vertex - lim.vertex);
    EXPECT_LT(a, g0);
    EXPECT_LT(b, g1);
    EXPECT_LT(c, g2);
    EXPECT_LT(s.critical_vertex, lim.critical_vertex);  // approached from below
    g0 = a, g1 = b, g2 = c;
  }
  EXPECT_LT(std::max({g0, g1, g2}), 0.01);
}

TEST(Constants, AngleIntegralClosedFormAtTwo) {
  EXPECT_NEAR(constants::angle_integral_closed_form(2), 4.0 - std::numbers::pi, 1e-14);
  EXPECT_NEAR(constants::angle_integral_closed_form(3), 1.0 / 3.0, 1e-14);
}

TEST(Constants, RadiusAttenuation) {
  const DimensionConfig d{3, 2, 1.0};
  for (auto t : interval_types(2)) {
    EXPECT_EQ(constants::expected_interval_count(t, d, 1.0, 0.0), 0.0);
    EXPECT_NEAR(constants::expected_interval_count(t, d, 1.0, INFINITY), constants::interval_constant(t, 2, 3), 1e-14);
  }
  double prev = 0.0;
  for (double r = 0.0; r < 3.0; r += 0.1) {
    const double f = constants::radius_fraction(1, d, r);
    EXPECT_GE(f, prev);
    prev = f;
  }
  EXPECT_NEAR(prev, 1.0, 1e-6);
  // area and density scaling
  const DimensionConfig d2{3, 2, 8.0};
  EXPECT_NEAR(constants::expected_simplex_count(0, d2, 5.0, INFINITY),
              5.0 * 4.0 * constants::simplex_constant(0, 2, 3), 1e-11);
}

TEST(Constants, SimplexCountsSumIntervalsAtEveryRadius) {
  const DimensionConfig d{4, 2, 1.3};
  for (double r0 : {0.2, 0.7, 1.5}) {
    for (int j = 0; j <= 2; ++j) {
      double from = 0.0;
      for (auto t : interval_types(2)) {
        if (t.ell <= j && j <= t.m) from += binomial(t.m - t.ell, t.m - j) * constants::expected_interval_count(t, d, 1.0, r0);
      }
      EXPECT_NEAR(constants::expected_simplex_count(j, d, 1.0, r0), from, 1e-12);
    }
  }
}

TEST(Constants, UnsupportedAndInvalid) {
  EXPECT_THROW(constants::interval_constant({0, 0}, 3, 5), UnsupportedError);
  EXPECT_NO_THROW(constants::top_simplex_constant(3, 5));
  EXPECT_THROW(constants::interval_constant({0, 0}, 2, 2), DomainError);
  EXPECT_THROW(constants::interval_constant({2, 1}, 2, 3), DomainError);
  EXPECT_THROW(constants::simplex_constant(3, 2, 3), DomainError);
  EXPECT_THROW(constants::radius_fraction(0, {3, 2, 1.0}, -1.0), DomainError);
}
