#pragma once

// Monte Carlo estimation of interval and simplex rates, distribution-law
// tests, and numerical checks of the change-of-variables identities.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "anchormosaic/constants.hpp"
#include "anchormosaic/geometry.hpp"
#include "anchormosaic/mosaic1d.hpp"
#include "anchormosaic/mosaic2d.hpp"
#include "anchormosaic/sampler.hpp"
#include "anchormosaic/specfun.hpp"
#include "anchormosaic/statistics.hpp"

namespace anchormosaic {

/// Runs fn(0..count-1) on up to `threads` workers and returns the results in
/// index order. The exception of the lowest failing index is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

/// Index of an interval type in interval_types(k).
inline int type_index(IntervalType t, int k) {
  const auto types = interval_types(k);
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i] == t) return static_cast<int>(i);
  }
  throw DomainError("type_index: invalid interval type");
}

/// Counts from one sample; counts[t][i] is for thresholds[t].
struct ReplicateResult {
  std::size_t points = 0;
  std::vector<double> thresholds;
  std::vector<std::vector<long long>> interval_counts;  ///< [threshold][type index]
  std::vector<std::vector<long long>> simplex_counts;   ///< [threshold][dimension]
  std::vector<std::vector<double>> radii;               ///< [type index], anchors in window
  AuditReport audit;
};

struct CountOptions {
  std::vector<double> thresholds{std::numeric_limits<double>::infinity()};
  bool collect_radii = false;
  bool audit = false;
};

/// Builds the slice mosaic of `points` and counts intervals and simplices whose
/// anchor lies in `window`.
inline ReplicateResult count_mosaic(const std::vector<PointN>& points, int k, const Box& window,
                                    const CountOptions& opt = {}) {
  if (k != 1 && k != 2) throw UnsupportedError("count_mosaic: mosaics are implemented for k in {1, 2}");
  const auto ntypes = interval_types(k).size();
  ReplicateResult res;
  res.points = points.size();
  res.thresholds = opt.thresholds;
  res.interval_counts.assign(opt.thresholds.size(), std::vector<long long>(ntypes, 0));
  res.simplex_counts.assign(opt.thresholds.size(), std::vector<long long>(k + 1, 0));
  res.radii.assign(ntypes, {});

  struct Item {
    int slot;  // type index or dimension
    double radius;
  };
  std::vector<Item> intervals, simplices;

  if (k == 1) {
    const auto hp = rotate_to_halfplane(std::span<const PointN>(points));
    const auto m = radius_and_intervals_1d(build_1d(hp, {window.lo[0], window.hi[0]}));
    for (const auto& iv : m.intervals) {
      if (window.contains(iv.sphere.anchor)) intervals.push_back({type_index(iv.type, 1), iv.sphere.radius});
    }
    for (const auto& v : m.vertices) {
      if (window.contains(std::vector<double>{v.anchor})) simplices.push_back({0, v.radius});
    }
    for (const auto& e : m.edges) {
      if (window.contains(std::vector<double>{e.anchor})) simplices.push_back({1, e.radius});
    }
    if (opt.audit) res.audit = audit_1d(m, hp);
  } else {
    if (points.size() < 3) return res;
    const auto m = build_2d(points);
    for (const auto& iv : m.intervals) {
      if (window.contains(iv.sphere.anchor)) intervals.push_back({type_index(iv.type, 2), iv.sphere.radius});
    }
    for (int dim = 0; dim <= 2; ++dim) {
      for (std::size_t i = 0; i < m.simplex_count(dim); ++i) {
        const auto& sd = m.data({dim, static_cast<int>(i)});
        if (window.contains(sd.anchor)) simplices.push_back({dim, sd.radius});
      }
    }
    if (opt.audit) res.audit = audit_2d(m, points);
  }
  for (std::size_t t = 0; t < opt.thresholds.size(); ++t) {
    for (const auto& it : intervals) {
      if (it.radius <= opt.thresholds[t]) ++res.interval_counts[t][it.slot];
    }
    for (const auto& it : simplices) {
      if (it.radius <= opt.thresholds[t]) ++res.simplex_counts[t][it.slot];
    }
  }
  if (opt.collect_radii) {
    for (const auto& it : intervals) res.radii[it.slot].push_back(it.radius);
  }
  return res;
}

/// One row of a rate table.
struct RateRow {
  std::string kind;  ///< "interval" or "simplex"
  int ell = -1;      ///< lower-bound dimension; -1 for simplex rows
  int m = 0;         ///< upper-bound dimension, or the simplex dimension
  long long count = 0;
  double rate = 0.0;
  double se = 0.0;
  double predicted = 0.0;
  double z = 0.0;  ///< NaN if se == 0 and rate != predicted
};

struct ExperimentOptions {
  std::vector<double> extra_thresholds;  ///< radii besides r0 at which counts are recorded
  bool collect_radii = false;
  bool audit = false;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

struct ExperimentReport {
  SamplingConfig config;
  int replicates = 0;
  double r0 = std::numeric_limits<double>::infinity();
  double recommended_buffer = 0.0;
  std::vector<RateRow> intervals;
  std::vector<RateRow> simplices;
  std::vector<ReplicateResult> per_replicate;
  std::vector<std::vector<double>> radii;  ///< pooled over replicates, [type index]
  std::vector<std::string> warnings;
  AuditReport audit;
  double runtime_seconds = 0.0;
  long long total_points = 0;
};

namespace experiments_detail {

inline RateRow make_row(std::string kind, int ell, int m, const std::vector<double>& per_rep_rates, long long count,
                        double predicted) {
  stats::RunningMoments mom;
  for (double r : per_rep_rates) mom.add(r);
  RateRow row;
  row.kind = std::move(kind);
  row.ell = ell;
  row.m = m;
  row.count = count;
  row.rate = mom.mean;
  row.se = mom.standard_error();
  row.predicted = predicted;
  if (row.se > 0.0) row.z = (row.rate - predicted) / row.se;
  else row.z = row.rate == predicted ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  return row;
}

}  // namespace experiments_detail

/// Samples `replicates` independent windows and compares per-unit rates with
/// the closed-form constants attenuated at radius r0.
inline ExperimentReport estimate_interval_rates(const SamplingConfig& cfg, int replicates,
                                                std::optional<double> r0 = std::nullopt,
                                                const ExperimentOptions& opt = {}) {
  cfg.validate();
  if (cfg.k != 1 && cfg.k != 2) throw UnsupportedError("estimate_interval_rates: k must be 1 or 2");
  if (replicates < 1) throw DomainError("estimate_interval_rates: need at least one replicate");
  const auto t_start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = cfg;
  rep.replicates = replicates;
  rep.r0 = r0.value_or(std::numeric_limits<double>::infinity());
  if (!(rep.r0 >= 0.0)) throw DomainError("estimate_interval_rates: r0 must be non-negative");
  rep.recommended_buffer = choose_buffer(cfg, kDefaultBufferQuantile);
  if (cfg.buffer < rep.recommended_buffer) {
    rep.warnings.push_back("buffer " + std::to_string(cfg.buffer) + " is below the recommended " +
                           std::to_string(rep.recommended_buffer) + " (quantile 1-1e-6); counts near the radius tail may be biased");
  }
  CountOptions copt;
  copt.thresholds = {rep.r0};
  copt.thresholds.insert(copt.thresholds.end(), opt.extra_thresholds.begin(), opt.extra_thresholds.end());
  copt.collect_radii = opt.collect_radii;
  copt.audit = opt.audit;

  rep.per_replicate = parallel_map(static_cast<std::size_t>(replicates), opt.threads, [&](std::size_t i) {
    SamplingConfig c = cfg;
    c.replicate_index = cfg.replicate_index + i;
    return count_mosaic(sample_poisson_box(c), cfg.k, cfg.window, copt);
  });

  const auto dims = cfg.dims();
  const double norm = constants::density_scale(dims) * cfg.window.volume();
  const auto types = interval_types(cfg.k);
  rep.radii.assign(types.size(), {});
  for (const auto& r : rep.per_replicate) {
    rep.total_points += static_cast<long long>(r.points);
    rep.audit.merge(r.audit);
    for (std::size_t t = 0; t < types.size(); ++t) rep.radii[t].insert(rep.radii[t].end(), r.radii[t].begin(), r.radii[t].end());
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    std::vector<double> rates;
    long long total = 0;
    for (const auto& r : rep.per_replicate) {
      rates.push_back(static_cast<double>(r.interval_counts[0][t]) / norm);
      total += r.interval_counts[0][t];
    }
    const double predicted = constants::expected_interval_count(types[t], dims, 1.0, rep.r0) / constants::density_scale(dims);
    rep.intervals.push_back(experiments_detail::make_row("interval", types[t].ell, types[t].m, rates, total, predicted));
  }
  for (int j = 0; j <= cfg.k; ++j) {
    std::vector<double> rates;
    long long total = 0;
    for (const auto& r : rep.per_replicate) {
      rates.push_back(static_cast<double>(r.simplex_counts[0][j]) / norm);
      total += r.simplex_counts[0][j];
    }
    const double predicted = constants::expected_simplex_count(j, dims, 1.0, rep.r0) / constants::density_scale(dims);
    rep.simplices.push_back(experiments_detail::make_row("simplex", -1, j, rates, total, predicted));
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

/// Per replicate and threshold: d_j = sum over (ell, m) of binom(m-ell, m-j) c_{ell,m}.
inline AuditReport reconcile_simplex_counts(const ExperimentReport& report) {
  AuditReport audit;
  const int k = report.config.k;
  const auto types = interval_types(k);
  for (std::size_t r = 0; r < report.per_replicate.size(); ++r) {
    const auto& rr = report.per_replicate[r];
    for (std::size_t t = 0; t < rr.thresholds.size(); ++t) {
      for (int j = 0; j <= k; ++j) {
        ++audit.checks;
        long long from_intervals = 0;
        for (std::size_t i = 0; i < types.size(); ++i) {
          if (types[i].ell <= j && j <= types[i].m) {
            from_intervals += static_cast<long long>(binomial(types[i].m - types[i].ell, types[i].m - j)) * rr.interval_counts[t][i];
          }
        }
        if (from_intervals != rr.simplex_counts[t][j]) {
          audit.fail("replicate " + std::to_string(r) + ", r0 " + std::to_string(rr.thresholds[t]) + ", dimension " +
                     std::to_string(j) + ": " + std::to_string(rr.simplex_counts[t][j]) + " simplices vs " +
                     std::to_string(from_intervals) + " from intervals");
        }
      }
    }
  }
  return audit;
}

/// KS test of interval radii against the Gamma law: P(shape, rate_scale r^n) ~ U[0,1].
inline stats::KsResult ks_gamma_test(const std::vector<double>& radii, double shape, double rate_scale, int n) {
  if (radii.size() < 100) throw DomainError("ks_gamma_test: need at least 100 radii");
  if (!(shape > 0.0) || !(rate_scale > 0.0) || n < 1) throw DomainError("ks_gamma_test: invalid law parameters");
  std::vector<double> u;
  u.reserve(radii.size());
  for (double r : radii) u.push_back(specfun::regularized_lower_gamma(shape, rate_scale * std::pow(r, n)));
  return stats::ks_test_uniform(std::move(u));
}

// ---------------------------------------------------------------------------
// Change-of-variables identities

enum class TestFunction { Gaussian, Bump };

struct BpConfig {
  int n = 2;
  int k = 1;
  int m = 1;
  TestFunction function = TestFunction::Gaussian;
  long long samples = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct BpResult {
  BpConfig config;
  stats::Estimate left;
  stats::Estimate right;
  double analytic = 0.0;  ///< exact value of the left side
  bool overlap = false;
  bool left_covers_analytic = false;
  bool right_covers_analytic = false;
};

namespace experiments_detail {

inline double test_function(TestFunction f, const std::vector<Eigen::VectorXd>& xs) {
  double s = 0.0;
  if (f == TestFunction::Gaussian) {
    for (const auto& x : xs) s += x.squaredNorm();
    return std::exp(-s);
  }
  double p = 1.0;
  for (const auto& x : xs) {
    const double t = 1.0 - x.squaredNorm();
    if (t <= 0.0) return 0.0;
    p *= t * t;
  }
  return p;
}

// Integral of the test function over (R^n)^(m+1).
inline double test_function_integral(TestFunction f, int n, int m) {
  if (f == TestFunction::Gaussian) return std::pow(std::numbers::pi, 0.5 * n * (m + 1));
  // sigma_n * int_0^1 (1-r^2)^2 r^(n-1) dr = sigma_n B(n/2, 3) / 2
  const double one = GeometryConstants::sigma(n) * 0.5 * specfun::beta_fn(0.5 * n, 3.0);
  return std::pow(one, m + 1);
}

inline Eigen::VectorXd uniform_on_sphere(int d, std::mt19937_64& g) {
  Eigen::VectorXd v(d);
  do {
    for (int i = 0; i < d; ++i) v[i] = standard_normal(g);
  } while (v.squaredNorm() == 0.0);
  return v.normalized();
}

// Importance proposal for the unit vectors u_0..u_m on the sphere S^{d-1} of
// P x R^{n-k} (coordinates: m along P, then n-k vertical). Each factor is an
// even mixture of the uniform law and a law concentrated where the integrand
// of the right side is large: u_0 near the horizontal P, u_i (i >= 1) near u_0.
class SphereProposal {
 public:
  SphereProposal(int m, int vertical) : m_(m), v_(vertical), d_(m + vertical) {
    log_area_ = GeometryConstants::log_sigma(d_);
    horizontal_ = m_ >= 1 && v_ >= 1;
    cluster_ = d_ >= 2;
  }

  std::vector<Eigen::VectorXd> sample(std::mt19937_64& g, int count) const {
    std::vector<Eigen::VectorXd> u;
    u.push_back(uniform01(g) < 0.5 || !horizontal_ ? uniform_on_sphere(d_, g) : sample_horizontal(g));
    for (int i = 1; i < count; ++i) {
      u.push_back(uniform01(g) < 0.5 || !cluster_ ? uniform_on_sphere(d_, g) : sample_cluster(u[0], g));
    }
    return u;
  }

  double log_density(const std::vector<Eigen::VectorXd>& u) const {
    double s = mix(-log_area_, horizontal_ ? log_horizontal(u[0]) : -log_area_, horizontal_);
    for (std::size_t i = 1; i < u.size(); ++i) {
      s += mix(-log_area_, cluster_ ? log_cluster(u[i], u[0]) : -log_area_, cluster_);
    }
    return s;
  }

 private:
  static constexpr double kPower = 3.0;  // angle = scale * U^kPower
  int m_, v_, d_;
  double log_area_ = 0.0;
  bool horizontal_ = false;
  bool cluster_ = false;

  static double mix(double la, double lb, bool enabled) {
    if (!enabled) return la;
    const double hi = std::max(la, lb);
    return hi + std::log(0.5 * std::exp(la - hi) + 0.5 * std::exp(lb - hi));
  }

  // Angle density of scale * U^kPower on [0, scale].
  static double log_angle_density(double angle, double scale) {
    return -std::log(kPower * scale) + (1.0 / kPower - 1.0) * std::log(angle / scale);
  }

  Eigen::VectorXd sample_horizontal(std::mt19937_64& g) const {
    const double psi = 0.5 * std::numbers::pi * std::pow(uniform01(g), kPower);
    Eigen::VectorXd u(d_);
    u.head(m_) = std::cos(psi) * uniform_on_sphere(m_, g);
    u.tail(v_) = std::sin(psi) * uniform_on_sphere(v_, g);
    return u;
  }

  double log_horizontal(const Eigen::VectorXd& u) const {
    const double a = u.head(m_).norm();
    const double b = u.tail(v_).norm();
    const double psi = std::atan2(b, a);
    if (!(psi > 0.0)) return -std::numeric_limits<double>::infinity();
    return log_angle_density(psi, 0.5 * std::numbers::pi) - GeometryConstants::log_sigma(m_) -
           GeometryConstants::log_sigma(v_) - (m_ - 1) * std::log(std::cos(psi)) - (v_ - 1) * std::log(std::sin(psi));
  }

  Eigen::VectorXd sample_cluster(const Eigen::VectorXd& mu, std::mt19937_64& g) const {
    const double theta = std::numbers::pi * std::pow(uniform01(g), kPower);
    Eigen::VectorXd w = uniform_on_sphere(d_, g);
    w -= w.dot(mu) * mu;
    while (w.norm() < 1e-12) {
      w = uniform_on_sphere(d_, g);
      w -= w.dot(mu) * mu;
    }
    w.normalize();
    return std::cos(theta) * mu + std::sin(theta) * w;
  }

  double log_cluster(const Eigen::VectorXd& u, const Eigen::VectorXd& mu) const {
    const double c = std::clamp(u.dot(mu), -1.0, 1.0);
    const double s = (u - c * mu).norm();
    const double theta = std::atan2(s, c);
    if (!(theta > 0.0) || !(s > 0.0)) return -std::numeric_limits<double>::infinity();
    return log_angle_density(theta, std::numbers::pi) - GeometryConstants::log_sigma(d_ - 1) - (d_ - 2) * std::log(s);
  }
};

inline stats::RunningMoments bp_left_chunk(const BpConfig& c, std::uint64_t chunk, long long count) {
  // x ~ N(0, I) in (R^n)^(m+1); weight f(x) / phi(x).
  auto g = keyed_engine(c.seed, chunk, 1);
  const int dim = c.n * (c.m + 1);
  stats::RunningMoments mom;
  std::vector<Eigen::VectorXd> xs(c.m + 1, Eigen::VectorXd(c.n));
  for (long long s = 0; s < count; ++s) {
    double q2 = 0.0;
    for (auto& x : xs) {
      for (int i = 0; i < c.n; ++i) x[i] = standard_normal(g);
      q2 += x.squaredNorm();
    }
    const double log_phi = -0.5 * dim * std::log(2.0 * std::numbers::pi) - 0.5 * q2;
    const double f = test_function(c.function, xs);
    mom.add(f > 0.0 ? std::exp(std::log(f) - log_phi) : 0.0);
  }
  return mom;
}

inline stats::RunningMoments bp_right_chunk(const BpConfig& c, std::uint64_t chunk, long long count) {
  auto g = keyed_engine(c.seed, chunk, 2);
  const int n = c.n, k = c.k, m = c.m;
  const int vertical = n - k;
  const int alpha = n * (m + 1) - (k + 1);
  const double s_shape = 0.5 * (alpha + 1);
  const double log_grass = std::log(grassmannian_measure(m, k));
  const SphereProposal proposal(m, vertical);
  std::gamma_distribution<double> gamma(s_shape, 1.0);
  stats::RunningMoments mom;
  std::vector<Eigen::VectorXd> xs(m + 1, Eigen::VectorXd(n));

  for (long long smp = 0; smp < count; ++smp) {
    // P: uniform m-plane of R^k via QR of a Gaussian matrix.
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(k, m);
    if (m < k && m > 0) {
      Eigen::MatrixXd gm(k, m);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) gm(i, j) = standard_normal(g);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(gm);
      basis = qr.householderQ() * Eigen::MatrixXd::Identity(k, m);
    }
    const auto u = proposal.sample(g, m + 1);
    Eigen::VectorXd mean_h = Eigen::VectorXd::Zero(m);
    for (const auto& ui : u) mean_h += ui.head(m);
    mean_h /= (m + 1);
    const double q = (m + 1) * std::max(0.0, 1.0 - mean_h.squaredNorm());
    if (!(q > 0.0)) continue;  // measure zero
    const double r2 = gamma(g) / q;
    const double r = std::sqrt(r2);
    const Eigen::VectorXd center = -r * (basis * mean_h);
    const double sd = std::sqrt(1.0 / (2.0 * (m + 1)));
    Eigen::VectorXd y(k);
    for (int i = 0; i < k; ++i) y[i] = center[i] + sd * standard_normal(g);

    for (int i = 0; i <= m; ++i) {
      xs[i].head(k) = y + r * (basis * u[i].head(m));
      xs[i].tail(vertical) = r * u[i].tail(vertical);
    }
    const double f = test_function(c.function, xs);
    if (!(f > 0.0)) {
      mom.add(0.0);
      continue;
    }
    // Jacobian r^alpha [m! Vol_m(u')]^(k-m+1), with u' the coordinates along P;
    // for m = k the coordinates of u are already those of R^n.
    double log_jac;
    if (m == k) {
      const double jac = bp_jacobian(r, u, k, n);
      if (!(jac > 0.0)) {
        mom.add(0.0);
        continue;
      }
      log_jac = std::log(jac);
    } else {
      double vol = 1.0;
      if (m > 0) {
        Eigen::MatrixXd dm(m, m);
        for (int i = 0; i < m; ++i) dm.col(i) = u[i + 1].head(m) - u[0].head(m);
        vol = std::abs(dm.determinant());
      }
      if (!(vol > 0.0)) {
        mom.add(0.0);
        continue;
      }
      log_jac = alpha * std::log(r) + (k - m + 1) * std::log(vol);
    }
    const double log_qr = std::log(2.0) + s_shape * std::log(q) + alpha * std::log(r) - q * r2 - std::lgamma(s_shape);
    const double log_qy = 0.5 * k * std::log((m + 1) / std::numbers::pi) - (m + 1) * (y - center).squaredNorm();
    const double log_w = log_grass + std::log(f) + log_jac - proposal.log_density(u) - log_qr - log_qy;
    mom.add(std::exp(log_w));
  }
  return mom;
}

}  // namespace experiments_detail

/// Two-sided Monte Carlo check of the (anchored) change of variables: the left
/// side over (R^n)^(m+1) and the right side over (y, P, r, u).
inline BpResult verify_bp_identity(const BpConfig& cfg) {
  if (!(0 <= cfg.m && cfg.m <= cfg.k && cfg.k <= cfg.n) || cfg.k < 1 || cfg.n > 6) {
    throw DomainError("verify_bp_identity: need 0 <= m <= k <= n <= 6 and k >= 1");
  }
  if (cfg.samples < 2) throw DomainError("verify_bp_identity: need at least two samples");
  constexpr long long kChunk = 100000;
  const std::size_t chunks = static_cast<std::size_t>((cfg.samples + kChunk - 1) / kChunk);
  auto chunk_size = [&](std::size_t i) {
    return std::min<long long>(kChunk, cfg.samples - static_cast<long long>(i) * kChunk);
  };
  auto fold = [&](const std::vector<stats::RunningMoments>& parts) {
    stats::RunningMoments all;
    for (const auto& p : parts) all.merge(p);
    return stats::Estimate{all.mean, all.standard_error()};
  };
  BpResult res;
  res.config = cfg;
  res.left = fold(parallel_map(chunks, cfg.threads, [&](std::size_t i) {
    return experiments_detail::bp_left_chunk(cfg, i, chunk_size(i));
  }));
  res.right = fold(parallel_map(chunks, cfg.threads, [&](std::size_t i) {
    return experiments_detail::bp_right_chunk(cfg, i, chunk_size(i));
  }));
  res.analytic = experiments_detail::test_function_integral(cfg.function, cfg.n, cfg.m);
  res.overlap = res.left.overlaps(res.right);
  res.left_covers_analytic = res.left.covers(res.analytic);
  res.right_covers_analytic = res.right.covers(res.analytic);
  return res;
}

struct AngleIntegralResult {
  int n = 0;
  double quadrature = 0.0;
  double quadrature_swapped = 0.0;  ///< same integral with the order of integration swapped
  double closed_form = 0.0;
};

/// Quadrature of (sin a sin b)^(n-2) |cos b - cos a| over [0, pi/2)^2 against
/// its closed form.
inline AngleIntegralResult verify_angle_integral(int n) {
  if (n < 2) throw DomainError("verify_angle_integral: need n >= 2");
  using boost::math::quadrature::gauss_kronrod;
  const double half_pi = 0.5 * std::numbers::pi;
  auto integrand = [n](double a, double b) {
    return std::pow(std::sin(a) * std::sin(b), n - 2) * std::abs(std::cos(b) - std::cos(a));
  };
  auto inner = [&](double outer, bool swapped) {
    auto f = [&](double t) { return swapped ? integrand(t, outer) : integrand(outer, t); };
    // Split at the kink t = outer.
    double v = 0.0;
    if (outer > 0.0) v += gauss_kronrod<double, 61>::integrate(f, 0.0, outer, 4, 1e-13);
    if (outer < half_pi) v += gauss_kronrod<double, 61>::integrate(f, outer, half_pi, 4, 1e-13);
    return v;
  };
  AngleIntegralResult r;
  r.n = n;
  r.quadrature = gauss_kronrod<double, 61>::integrate([&](double a) { return inner(a, false); }, 0.0, half_pi, 8, 1e-12);
  r.quadrature_swapped = gauss_kronrod<double, 61>::integrate([&](double b) { return inner(b, true); }, 0.0, half_pi, 8, 1e-12);
  r.closed_form = constants::angle_integral_closed_form(n);
  return r;
}

struct GammaLemmaDraw {
  double j = 0.0, p = 0.0, c = 0.0, t0 = 0.0;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double relative_error() const { return std::abs(closed_form - quadrature) / std::abs(quadrature); }
};

/// Direct quadrature of int_0^t0 t^(j-1) exp(-c t^p) dt by tanh-sinh.
inline double power_exp_quadrature(double j, double p, double c, double t0) {
  boost::math::quadrature::tanh_sinh<double> ts(15);
  auto f = [=](double t) { return t > 0.0 ? std::exp((j - 1.0) * std::log(t) - c * std::pow(t, p)) : 0.0; };
  return ts.integrate(f, 0.0, t0, 1e-14);
}

/// Random parameter draws of the power-exponential integral, both signs of p.
inline std::vector<GammaLemmaDraw> verify_gamma_lemma(int draws, std::uint64_t seed) {
  auto g = keyed_engine(seed, 0, 3);
  std::vector<GammaLemmaDraw> out;
  for (int i = 0; i < draws; ++i) {
    GammaLemmaDraw d;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    d.p = sign * (0.5 + 3.5 * uniform01(g));
    d.j = d.p * (0.3 + 4.7 * uniform01(g));
    d.c = 0.2 + 2.8 * uniform01(g);
    d.t0 = 0.2 + 2.8 * uniform01(g);
    d.closed_form = specfun::power_exp_integral(d.j, d.p, d.c, d.t0);
    d.quadrature = power_exp_quadrature(d.j, d.p, d.c, d.t0);
    out.push_back(d);
  }
  return out;
}

struct BetaLawResult {
  int n = 0, k = 0;
  std::size_t samples = 0;
  stats::KsResult derived;  ///< against Beta(k/2, (n-k)/2)
  stats::KsResult alternative;  ///< against Beta(k/n, (n-k)/n)
};

/// Law of the squared length of the projection of a uniform unit vector of R^n to R^k.
inline BetaLawResult verify_beta_law(int n, int k, std::size_t samples, std::uint64_t seed) {
  if (!(1 <= k && k < n)) throw DomainError("verify_beta_law: need 1 <= k < n");
  auto g = keyed_engine(seed, 0, 4);
  std::vector<double> r2;
  r2.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto u = experiments_detail::uniform_on_sphere(n, g);
    r2.push_back(u.head(k).squaredNorm());
  }
  BetaLawResult res;
  res.n = n;
  res.k = k;
  res.samples = samples;
  const double a = 0.5 * k, b = 0.5 * (n - k);
  res.derived = stats::ks_test(r2, [=](double t) { return specfun::regularized_beta(std::clamp(t, 0.0, 1.0), a, b); });
  const double a2 = static_cast<double>(k) / n, b2 = static_cast<double>(n - k) / n;
  res.alternative = stats::ks_test(r2, [=](double t) { return specfun::regularized_beta(std::clamp(t, 0.0, 1.0), a2, b2); });
  return res;
}

}  // namespace anchormosaic
