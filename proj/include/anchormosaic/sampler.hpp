#pragma once

// Seeded homogeneous Poisson sampling in buffered boxes of R^n.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "anchormosaic/constants.hpp"
#include "anchormosaic/error.hpp"
#include "anchormosaic/geometry.hpp"
#include "anchormosaic/specfun.hpp"

namespace anchormosaic {

/// Axis-aligned box in R^k.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
  }
  template <class Vec>
  bool contains(const Vec& z) const {
    for (int i = 0; i < dim(); ++i) {
      if (z[i] < lo[i] || z[i] > hi[i]) return false;
    }
    return true;
  }
  /// [0, L]^k
  static Box cube(int k, double length) { return {std::vector<double>(k, 0.0), std::vector<double>(k, length)}; }
};

struct SamplingConfig {
  int n = 2;
  int k = 1;
  double rho = 1.0;
  Box window = Box::cube(1, 1.0);
  double buffer = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
  double max_expected_points = 1e7;

  DimensionConfig dims() const { return {n, k, rho}; }

  double sampling_volume() const {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= window.hi[i] - window.lo[i] + 2.0 * buffer;
    for (int i = k; i < n; ++i) v *= 2.0 * buffer;
    return v;
  }

  void validate() const {
    dims().validate();
    if (window.dim() != k || static_cast<int>(window.hi.size()) != k) {
      throw DomainError("SamplingConfig: window dimension must equal k");
    }
    for (int i = 0; i < k; ++i) {
      if (!(window.hi[i] > window.lo[i]) || !std::isfinite(window.lo[i]) || !std::isfinite(window.hi[i])) {
        throw DomainError("SamplingConfig: window must be a finite non-degenerate box");
      }
    }
    if (!(buffer >= 0.0) || !std::isfinite(buffer)) throw DomainError("SamplingConfig: buffer must be finite and >= 0");
    if (!(max_expected_points > 0.0)) throw DomainError("SamplingConfig: max_expected_points must be positive");
  }
};

inline void to_json(nlohmann::json& j, const Box& b) { j = nlohmann::json{{"lo", b.lo}, {"hi", b.hi}}; }
inline void from_json(const nlohmann::json& j, Box& b) {
  j.at("lo").get_to(b.lo);
  j.at("hi").get_to(b.hi);
}
inline void to_json(nlohmann::json& j, const SamplingConfig& c) {
  j = nlohmann::json{{"n", c.n},
                     {"k", c.k},
                     {"rho", c.rho},
                     {"window", c.window},
                     {"buffer", c.buffer},
                     {"seed", c.seed},
                     {"replicate_index", c.replicate_index},
                     {"max_expected_points", c.max_expected_points}};
}
inline void from_json(const nlohmann::json& j, SamplingConfig& c) {
  SamplingConfig d;
  c.n = j.value("n", d.n);
  c.k = j.value("k", d.k);
  c.rho = j.value("rho", d.rho);
  c.window = j.contains("window") ? j.at("window").get<Box>() : Box::cube(c.k, 1.0);
  c.buffer = j.value("buffer", d.buffer);
  c.seed = j.value("seed", d.seed);
  c.replicate_index = j.value("replicate_index", d.replicate_index);
  c.max_expected_points = j.value("max_expected_points", d.max_expected_points);
}

/// Name of the environment variable that overrides the global seed.
inline constexpr const char* kSeedEnvVar = "ANCHORMOSAIC_SEED";

/// The seed to use: ANCHORMOSAIC_SEED if set to an unsigned integer, else `fallback`.
inline std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* s = std::getenv(kSeedEnvVar);
  if (s == nullptr || *s == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') throw DomainError(std::string(kSeedEnvVar) + " must be an unsigned integer");
  return v;
}

/// Generator for one (seed, replicate, stream) key; streams for distinct keys
/// are seeded independently, so replicates need no coordination.
inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits; fixed across standard libraries.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Standard normal deviate by the polar method on uniform01.
inline double standard_normal(std::mt19937_64& g) {
  for (;;) {
    const double u = 2.0 * uniform01(g) - 1.0;
    const double v = 2.0 * uniform01(g) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

/// Poisson(rho * volume) many points uniform in the buffered box.
inline std::vector<PointN> sample_poisson_box(const SamplingConfig& cfg) {
  cfg.validate();
  const double mean = cfg.rho * cfg.sampling_volume();
  if (mean > cfg.max_expected_points) {
    throw DomainError("sample_poisson_box: expected point count " + std::to_string(mean) + " exceeds the cap");
  }
  std::vector<PointN> pts;
  if (!(mean > 0.0)) return pts;
  auto g = keyed_engine(cfg.seed, cfg.replicate_index);
  std::poisson_distribution<long long> count(mean);
  const long long n_pts = count(g);
  std::vector<double> lo(cfg.n), span(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    lo[i] = i < cfg.k ? cfg.window.lo[i] - cfg.buffer : -cfg.buffer;
    span[i] = i < cfg.k ? cfg.window.hi[i] - cfg.window.lo[i] + 2.0 * cfg.buffer : 2.0 * cfg.buffer;
  }
  pts.reserve(static_cast<std::size_t>(n_pts));
  for (long long p = 0; p < n_pts; ++p) {
    Eigen::VectorXd x(cfg.n);
    for (int i = 0; i < cfg.n; ++i) x[i] = lo[i] + span[i] * uniform01(g);
    pts.emplace_back(std::move(x));
  }
  return pts;
}

/// Radius exceeded by the largest-shape (m = k) interval radius law with
/// probability at most 1 - r_quantile.
inline double choose_buffer(const SamplingConfig& cfg, double r_quantile) {
  if (!(r_quantile > 0.0 && r_quantile < 1.0)) throw DomainError("choose_buffer: quantile must lie in (0, 1)");
  cfg.dims().validate();
  const double shape = cfg.k + 1.0 - static_cast<double>(cfg.k) / cfg.n;
  const double x = specfun::inverse_regularized_lower_gamma(shape, r_quantile);
  return std::pow(x / (cfg.rho * GeometryConstants::nu(cfg.n)), 1.0 / cfg.n);
}

/// Default buffer quantile: counted anchors depend on unsampled points with
/// probability below 1e-6 per interval.
inline constexpr double kDefaultBufferQuantile = 1.0 - 1e-6;

}  // namespace anchormosaic
