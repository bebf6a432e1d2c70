// Samples a Poisson process in R^3, slices it with the plane x3 = 0, and
// compares interval counts of the planar mosaic with the closed forms.

#include <cstdio>
#include <limits>

#include "anchormosaic/experiments.hpp"

int main() {
  using namespace anchormosaic;

  SamplingConfig cfg;
  cfg.n = 3;
  cfg.k = 2;
  cfg.rho = 1.0;
  cfg.window = Box::cube(2, 15.0);
  cfg.seed = seed_from_env(2024);
  cfg.buffer = choose_buffer(cfg, kDefaultBufferQuantile);

  const auto points = sample_poisson_box(cfg);
  CountOptions opt;
  opt.audit = true;
  const ReplicateResult r = count_mosaic(points, cfg.k, cfg.window, opt);

  std::printf("%zu points, buffer %.3f, audit %s (%ld checks)\n", points.size(), cfg.buffer,
              r.audit.ok() ? "clean" : "FAILED", r.audit.checks);
  const double area = cfg.window.volume();
  std::printf("%6s %10s %12s\n", "type", "observed", "expected");
  const auto types = interval_types(cfg.k);
  for (std::size_t t = 0; t < types.size(); ++t) {
    const double expected = constants::expected_interval_count(types[t], cfg.dims(), area, std::numeric_limits<double>::infinity());
    std::printf("(%d,%d) %10lld %12.2f\n", types[t].ell, types[t].m, r.interval_counts[0][t], expected);
  }
  return r.audit.ok() ? 0 : 1;
}
