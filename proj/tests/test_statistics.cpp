#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "anchormosaic/sampler.hpp"
#include "anchormosaic/statistics.hpp"

using namespace anchormosaic;

TEST(Statistics, WelfordMatchesTwoPass) {
  std::mt19937_64 g(1);
  std::vector<double> x;
  for (int i = 0; i < 1000; ++i) x.push_back(1e6 + standard_normal(g));
  stats::RunningMoments m, a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.add(x[i]);
    (i < 300 ? a : b).add(x[i]);
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(m.mean, mean, 1e-8);
  EXPECT_NEAR(m.variance(), ss / (x.size() - 1), 1e-9);
  a.merge(b);
  EXPECT_EQ(a.count, m.count);
  EXPECT_NEAR(a.mean, m.mean, 1e-9);
  EXPECT_NEAR(a.variance(), m.variance(), 1e-9);
  EXPECT_NEAR(m.standard_error(), std::sqrt(m.variance() / 1000.0), 1e-15);
}

TEST(Statistics, EstimateIntervals) {
  const stats::Estimate a{1.0, 0.1}, b{1.25, 0.05}, c{2.0, 0.1};
  EXPECT_TRUE(a.overlaps(b));
  EXPECT_FALSE(a.overlaps(c));
  EXPECT_TRUE(a.covers(1.19));
  EXPECT_FALSE(a.covers(1.2));
}

TEST(Statistics, KolmogorovSurvivalKnownValues) {
  // classical critical values
  EXPECT_NEAR(stats::kolmogorov_survival(1.3581), 0.05, 2e-4);
  EXPECT_NEAR(stats::kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_EQ(stats::kolmogorov_survival(0.0), 1.0);
}

TEST(Statistics, KsCalibratedUnderNull) {
  // p-values from repeated null samples are themselves close to uniform
  std::mt19937_64 g(2);
  std::vector<double> p;
  for (int rep = 0; rep < 400; ++rep) {
    std::vector<double> u(200);
    for (auto& v : u) v = uniform01(g);
    p.push_back(stats::ks_test_uniform(u).p_value);
  }
  int below = 0;
  for (double v : p) below += v < 0.05;
  EXPECT_NEAR(below / 400.0, 0.05, 0.035);
}

TEST(Statistics, KsRejectsWrongLaw) {
  std::mt19937_64 g(3);
  std::vector<double> u(2000);
  for (auto& v : u) v = std::pow(uniform01(g), 1.2);
  EXPECT_LT(stats::ks_test_uniform(u).p_value, 1e-6);
  EXPECT_THROW(stats::ks_test_uniform({}), DomainError);
}

TEST(Statistics, ChiSquare) {
  const std::vector<double> obs{10, 20, 30}, exp{20, 20, 20};
  const auto r = stats::chi_square_test(obs, exp);
  EXPECT_DOUBLE_EQ(r.statistic, 10.0);
  EXPECT_EQ(r.dof, 2);
  EXPECT_NEAR(r.p_value, std::exp(-5.0), 1e-14);  // chi^2_2 survival is e^{-x/2}
  const std::vector<double> bad{1.0};
  EXPECT_THROW(stats::chi_square_test(bad, bad), DomainError);
}

TEST(Statistics, Correlation) {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1};
  EXPECT_NEAR(stats::correlation(a, b), 1.0, 1e-14);
  EXPECT_NEAR(stats::correlation(a, c), -1.0, 1e-14);
}
