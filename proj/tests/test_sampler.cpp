#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "anchormosaic/sampler.hpp"
#include "anchormosaic/statistics.hpp"

using namespace anchormosaic;

namespace {

SamplingConfig base(int n, int k, double side, double buffer, std::uint64_t seed) {
  SamplingConfig c;
  c.n = n;
  c.k = k;
  c.window = Box::cube(k, side);
  c.buffer = buffer;
  c.seed = seed;
  return c;
}

struct SeedEnvGuard {
  SeedEnvGuard() { unsetenv(kSeedEnvVar); }
  ~SeedEnvGuard() { unsetenv(kSeedEnvVar); }
};

}  // namespace

TEST(Sampler, PoissonCountMeanAndVariance) {
  auto c = base(3, 2, 5.0, 1.0, 1);
  const double mean = c.rho * c.sampling_volume();
  EXPECT_DOUBLE_EQ(mean, 7.0 * 7.0 * 2.0);
  stats::RunningMoments m;
  for (std::uint64_t r = 0; r < 400; ++r) {
    c.replicate_index = r;
    m.add(static_cast<double>(sample_poisson_box(c).size()));
  }
  EXPECT_NEAR(m.mean, mean, 4.0 * std::sqrt(mean / 400.0));
  EXPECT_NEAR(m.variance() / mean, 1.0, 0.25);
}

TEST(Sampler, PointsLieInBufferedBox) {
  const auto c = base(4, 2, 3.0, 0.5, 2);
  for (const auto& p : sample_poisson_box(c)) {
    ASSERT_EQ(p.dim(), 4);
    EXPECT_GE(p[0], -0.5);
    EXPECT_LE(p[0], 3.5);
    EXPECT_GE(p[3], -0.5);
    EXPECT_LE(p[3], 0.5);
  }
}

TEST(Sampler, CoordinatesAreUniform) {
  const auto c = base(2, 1, 100.0, 1.0, 3);
  std::vector<double> u;
  for (const auto& p : sample_poisson_box(c)) u.push_back((p[0] + 1.0) / 102.0);
  ASSERT_GT(u.size(), 100u);
  EXPECT_GT(stats::ks_test_uniform(u).p_value, 1e-3);
}

TEST(Sampler, DeterministicPerKey) {
  auto c = base(3, 2, 4.0, 1.0, 99);
  const auto a = sample_poisson_box(c);
  const auto b = sample_poisson_box(c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].coords, b[i].coords);
  c.replicate_index = 1;
  const auto d = sample_poisson_box(c);
  EXPECT_FALSE(d.size() == a.size() && d.front().coords == a.front().coords);
}

TEST(Sampler, KeyedStreamsDiffer) {
  auto a = keyed_engine(5, 0, 0), b = keyed_engine(5, 0, 1), c = keyed_engine(5, 1, 0);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
  EXPECT_EQ(x, keyed_engine(5, 0, 0)());
}

TEST(Sampler, SeedFromEnvironment) {
  SeedEnvGuard guard;
  EXPECT_EQ(seed_from_env(42), 42u);
  setenv(kSeedEnvVar, "12345", 1);
  EXPECT_EQ(seed_from_env(42), 12345u);
  setenv(kSeedEnvVar, "12x", 1);
  EXPECT_THROW(seed_from_env(42), DomainError);
}

TEST(Sampler, BufferQuantile) {
  const auto c = base(3, 2, 10.0, 0.0, 0);
  const double b = choose_buffer(c, kDefaultBufferQuantile);
  // P(shape, rho nu r^n) at the buffer equals the quantile
  const double shape = 2.0 + 1.0 - 2.0 / 3.0;
  EXPECT_NEAR(specfun::regularized_lower_gamma(shape, GeometryConstants::nu(3) * std::pow(b, 3)), kDefaultBufferQuantile,
              1e-12);
  auto dense = c;
  dense.rho = 8.0;
  EXPECT_NEAR(choose_buffer(dense, kDefaultBufferQuantile), b / 2.0, 1e-12);
  EXPECT_THROW(choose_buffer(c, 1.0), DomainError);
}

TEST(Sampler, ValidationErrors) {
  auto c = base(3, 2, 10.0, 1.0, 0);
  c.window = Box::cube(1, 10.0);
  EXPECT_THROW(sample_poisson_box(c), DomainError);
  c = base(3, 2, 10.0, -1.0, 0);
  EXPECT_THROW(sample_poisson_box(c), DomainError);
  c = base(2, 3, 10.0, 1.0, 0);
  EXPECT_THROW(sample_poisson_box(c), DomainError);
  c = base(3, 2, 1e5, 1.0, 0);
  EXPECT_THROW(sample_poisson_box(c), DomainError);  // over the point cap
}

TEST(Sampler, ConfigJsonRoundTrip) {
  auto c = base(5, 2, 7.0, 1.25, 77);
  c.rho = 0.5;
  const nlohmann::json j = c;
  const auto d = j.get<SamplingConfig>();
  EXPECT_EQ(d.n, 5);
  EXPECT_EQ(d.k, 2);
  EXPECT_EQ(d.rho, 0.5);
  EXPECT_EQ(d.window.hi, c.window.hi);
  EXPECT_EQ(d.buffer, 1.25);
  EXPECT_EQ(d.seed, 77u);
}
