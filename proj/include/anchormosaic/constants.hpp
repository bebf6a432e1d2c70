#pragma once

// Closed-form constants for the expected number of intervals and simplices of
// k-dimensional weighted Poisson-Delaunay mosaics obtained by slicing an
// n-dimensional Poisson-Delaunay mosaic.
//
// Naming: C(l, m; k, n) is the constant of type (l, m) intervals and
// D(j; k, n) the constant of j-simplices. Expected counts are
//     C * P(m + 1 - k/n, rho nu_n r0^n) * rho^(k/n) * |R|.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "anchormosaic/error.hpp"
#include "anchormosaic/specfun.hpp"

namespace anchormosaic {

/// Ambient dimension, slice dimension and density of the Poisson process.
struct DimensionConfig {
  int n = 2;
  int k = 1;
  double rho = 1.0;

  void validate() const {
    if (n < 1) throw DomainError("DimensionConfig: n must be >= 1");
    if (k < 1 || k > n) throw DomainError("DimensionConfig: need 1 <= k <= n");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("DimensionConfig: rho must be positive");
  }
};

/// Dimensions (ell, m) of the lower and upper bound of an interval.
struct IntervalType {
  int ell = 0;
  int m = 0;

  constexpr bool valid_for(int k) const { return 0 <= ell && ell <= m && m <= k; }
  friend constexpr bool operator==(IntervalType, IntervalType) = default;
  friend constexpr auto operator<=>(IntervalType, IntervalType) = default;
};

/// All interval types of a k-dimensional mosaic, ordered by (ell, m).
inline std::vector<IntervalType> interval_types(int k) {
  std::vector<IntervalType> out;
  for (int ell = 0; ell <= k; ++ell) {
    for (int m = ell; m <= k; ++m) out.push_back({ell, m});
  }
  return out;
}

inline double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double v = 1.0;
  for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
  return v;
}

/// Surface volume of the unit sphere in R^n and volume of the unit ball in R^n.
struct GeometryConstants {
  static double log_sigma(int n) {
    if (n < 1) throw DomainError("sigma: n must be >= 1");
    return std::log(2.0) + 0.5 * n * std::log(std::numbers::pi) - specfun::log_gamma(0.5 * n);
  }
  static double log_nu(int n) { return log_sigma(n) - std::log(static_cast<double>(n)); }
  static double sigma(int n) { return std::exp(log_sigma(n)); }
  static double nu(int n) { return std::exp(log_nu(n)); }
};

/// Total measure of the Grassmannian G(m, k) of linear m-planes in R^k, normalized
/// so that the affine Blaschke-Petkantschin formula carries no extra constant:
/// prod_{j=k-m+1}^{k} sigma_j / prod_{j=1}^{m} sigma_j. G(1, k) has measure sigma_k / 2.
inline double grassmannian_measure(int m, int k) {
  if (m < 0 || m > k) throw DomainError("grassmannian_measure: need 0 <= m <= k");
  double log_v = 0.0;
  for (int j = k - m + 1; j <= k; ++j) log_v += GeometryConstants::log_sigma(j);
  for (int j = 1; j <= m; ++j) log_v -= GeometryConstants::log_sigma(j);
  return std::exp(log_v);
}

namespace constants {

namespace detail {

using specfun::log_gamma;
inline double lsig(int n) { return GeometryConstants::log_sigma(n); }
inline double lnu(int n) { return GeometryConstants::log_nu(n); }

inline void require_slice(int k, int n) {
  if (k < 1) throw DomainError("constants: k must be >= 1");
  if (n <= k) throw DomainError("constants: need n > k (got k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// One-dimensional slices, derived directly in the half-plane model.

/// C(0,0; 1, n) = sigma_{n-1} Gamma(1 - 1/n) / (n nu_n^(1 - 1/n)).
inline double critical_vertex_constant_1d(int n) {
  detail::require_slice(1, n);
  using namespace detail;
  const double nd = n;
  return std::exp(lsig(n - 1) + log_gamma(1.0 - 1.0 / nd) - std::log(nd) - (1.0 - 1.0 / nd) * lnu(n));
}

/// Angle integral int_{[0,pi/2)^2} (sin a sin b)^(n-2) |cos b - cos a| in closed form.
inline double angle_integral_closed_form(int n) {
  if (n < 2) throw DomainError("angle_integral_closed_form: n must be >= 2");
  using detail::log_gamma;
  const double nd = n;
  const double first = 2.0 * std::exp(log_gamma(nd - 1.0) - log_gamma(nd - 0.5));
  const double second = std::exp(log_gamma(0.5 * (nd - 1.0)) - log_gamma(0.5 * nd));
  return std::sqrt(std::numbers::pi) / (nd - 1.0) * (first - second);
}

/// C(0,1; 1, n) from the radial Gamma integral and the closed-form angle integral.
inline double vertex_edge_constant_1d(int n) {
  detail::require_slice(1, n);
  using namespace detail;
  const double nd = n;
  const double log_front = 2.0 * lsig(n - 1) + log_gamma(2.0 - 1.0 / nd) - std::log(nd) -
                           (2.0 - 1.0 / nd) * lnu(n);
  // The closed form carries sqrt(pi)/(n-1) already.
  return std::exp(log_front) * angle_integral_closed_form(n);
}

// ---------------------------------------------------------------------------
// General k (closed forms exist for intervals whose upper bound is a vertex or edge).

/// C(0,0; k, n) = sigma_{n-k} Gamma(1 - k/n) / (n nu_n^(1 - k/n)).
inline double critical_vertex_constant(int k, int n) {
  detail::require_slice(k, n);
  using namespace detail;
  const double kn = static_cast<double>(k) / n;
  return std::exp(lsig(n - k) + log_gamma(1.0 - kn) - std::log(static_cast<double>(n)) - (1.0 - kn) * lnu(n));
}

/// C(0,1; k, n) through the regularized 3F2(1/2, 1, (k-n+2)/2; (k+3)/2, (n+2)/2; 1).
inline double vertex_edge_constant(int k, int n) {
  detail::require_slice(k, n);
  using namespace detail;
  const double kd = k;
  const double nd = n;
  const double kn = kd / nd;
  const std::array<double, 3> a{0.5, 1.0, 0.5 * (kd - nd + 2.0)};
  const std::array<double, 2> b{0.5 * (kd + 3.0), 0.5 * (nd + 2.0)};
  const double series = specfun::hyp3f2(a, b, 1.0);
  if (!(series > 0.0)) throw NumericalError("vertex_edge_constant: non-positive 3F2 value");
  int reg_sign = 1;
  const double log_reg = specfun::log_regularizer(b, &reg_sign);
  const double log_v = 2.0 * lsig(n - k + 1) + lsig(k) + log_gamma(2.0 - kn) - std::log(4.0 * nd) -
                       (2.0 - kn) * lnu(n) + log_gamma(kd + 1.0) + 2.0 * log_gamma(0.5 * (nd - kd + 1.0)) -
                       kd * std::log(2.0) - 0.5 * std::log(std::numbers::pi) - log_gamma(0.5 * (nd - kd)) +
                       log_reg + std::log(series);
  return reg_sign * std::exp(log_v);
}

/// C(1,1; k, n) through the Beta-function sum.
inline double critical_edge_constant(int k, int n) {
  detail::require_slice(k, n);
  using namespace detail;
  const double kd = k;
  const double nd = n;
  const double kn = kd / nd;
  const double h = 0.5 * (nd - kd);
  // Beta(h, (i+1)/2) Beta(h, (k-i+1)/2) / Beta(h, 1/2)^2, summed in log space per term.
  const double log_b_half = specfun::log_beta_fn(h, 0.5);
  double sum = 0.0;
  for (int i = 0; i <= k; ++i) {
    sum += binomial(k, i) * std::exp(specfun::log_beta_fn(h, 0.5 * (i + 1)) +
                                     specfun::log_beta_fn(h, 0.5 * (k - i + 1)) - 2.0 * log_b_half);
  }
  const double log_front = 2.0 * lsig(n - k + 1) + lsig(k) + log_gamma(2.0 - kn) - std::log(8.0 * nd) -
                           (2.0 - kn) * lnu(n);
  return std::exp(log_front) * sum;
}

/// C(1,1; 2, n) in its simplified planar form; must agree with critical_edge_constant(2, n).
inline double critical_edge_constant_2d(int n) {
  detail::require_slice(2, n);
  using namespace detail;
  const double nd = n;
  const double log_front = 2.0 * lsig(n - 1) + log_gamma(2.0 - 2.0 / nd) + std::log(std::numbers::pi) -
                           std::log(2.0 * nd) - (2.0 - 2.0 / nd) * lnu(n);
  const double bracket = 1.0 / (nd - 1.0) +
                         std::exp(2.0 * log_gamma(0.5 * (nd - 1.0)) - 2.0 * log_gamma(0.5 * nd)) / std::numbers::pi;
  return std::exp(log_front) * bracket;
}

/// D(k; k, n): expected number of top-dimensional simplices per unit rho^(k/n) |R|,
/// via the expected volume of the (n-k)-skeleton of the Voronoi tessellation.
inline double top_simplex_constant(int k, int n) {
  if (k < 1 || k >= n) throw DomainError("top_simplex_constant: need 1 <= k < n");
  using namespace detail;
  const double kd = k;
  const double nd = n;
  const double log_v = lsig(1) + lsig(n + 1) - lsig(k + 1) - lsig(n - k + 1) + (kd + 1.0) * std::log(2.0) +
                       0.5 * kd * std::log(std::numbers::pi) - std::log(nd) - log_gamma(kd + 2.0) +
                       log_gamma(0.5 * (kd * nd + nd - kd + 1.0)) - log_gamma(0.5 * (kd * nd + nd - kd)) +
                       (kd + 1.0 - kd / nd) * log_gamma(0.5 * (nd + 2.0)) - kd * log_gamma(0.5 * (nd + 1.0)) +
                       log_gamma(kd + 1.0 - kd / nd) - log_gamma(0.5 * (nd - kd + 1.0));
  return std::exp(log_v);
}

/// C(l, m; k, n) for k in {1, 2}.
///
/// k = 1 uses the half-plane formulas; k = 2 uses the three explicit constants
/// plus the Euler relation, the 2:1 triangle/vertex relation and D(2; 2, n).
inline double interval_constant(IntervalType t, int k, int n) {
  if (k >= 3) throw UnsupportedError("interval_constant: no closed form for k >= 3");
  detail::require_slice(k, n);
  if (!t.valid_for(k)) throw DomainError("interval_constant: invalid interval type for this k");
  if (k == 1) {
    if (t == IntervalType{0, 1}) return vertex_edge_constant_1d(n);
    return critical_vertex_constant_1d(n);  // (0,0) and (1,1) coincide
  }
  const double c00 = critical_vertex_constant(2, n);
  if (t == IntervalType{0, 0}) return c00;
  const double c01 = vertex_edge_constant(2, n);
  if (t == IntervalType{0, 1}) return c01;
  const double c11 = critical_edge_constant_2d(n);
  if (t == IntervalType{1, 1}) return c11;
  const double c22 = c11 - c00;
  if (t == IntervalType{2, 2}) return c22;
  const double d2 = top_simplex_constant(2, n);
  if (t == IntervalType{0, 2}) return -c00 - c01 + 0.5 * d2;
  return c00 + c01 - c22 + 0.5 * d2;  // (1, 2)
}

/// D(j; k, n) = sum_{m=j}^{k} sum_{l=0}^{j} binom(m-l, m-j) C(l, m; k, n).
inline double simplex_constant(int j, int k, int n) {
  if (j < 0 || j > k) throw DomainError("simplex_constant: need 0 <= j <= k");
  if (k >= 3) {
    if (j == k) return top_simplex_constant(k, n);
    throw UnsupportedError("simplex_constant: no closed form for j < k >= 3");
  }
  double sum = 0.0;
  for (int m = j; m <= k; ++m) {
    for (int ell = 0; ell <= j; ++ell) sum += binomial(m - ell, m - j) * interval_constant({ell, m}, k, n);
  }
  return sum;
}

/// P(m + 1 - k/n, rho nu_n r0^n): the fraction of type-(., m) intervals with radius <= r0.
inline double radius_fraction(int m, const DimensionConfig& cfg, double r0) {
  if (std::isnan(r0) || r0 < 0.0) throw DomainError("radius_fraction: r0 must be non-negative");
  if (std::isinf(r0)) return 1.0;
  const double shape = m + 1.0 - static_cast<double>(cfg.k) / cfg.n;
  const double x = cfg.rho * GeometryConstants::nu(cfg.n) * std::pow(r0, cfg.n);
  return specfun::regularized_lower_gamma(shape, x);
}

inline double density_scale(const DimensionConfig& cfg) {
  return std::pow(cfg.rho, static_cast<double>(cfg.k) / cfg.n);
}

/// Expected number of type-(l, m) intervals with anchor in a region of k-volume
/// `area` and radius at most r0 (r0 may be +infinity).
inline double expected_interval_count(IntervalType t, const DimensionConfig& cfg, double area, double r0) {
  cfg.validate();
  if (!(area >= 0.0)) throw DomainError("expected_interval_count: area must be non-negative");
  return interval_constant(t, cfg.k, cfg.n) * radius_fraction(t.m, cfg, r0) * density_scale(cfg) * area;
}

/// Expected number of j-simplices with anchor in the region and radius at most r0.
inline double expected_simplex_count(int j, const DimensionConfig& cfg, double area, double r0) {
  cfg.validate();
  if (!(area >= 0.0)) throw DomainError("expected_simplex_count: area must be non-negative");
  if (j < 0 || j > cfg.k) throw DomainError("expected_simplex_count: need 0 <= j <= k");
  if (cfg.k >= 3) {
    if (j != cfg.k) throw UnsupportedError("expected_simplex_count: no closed form for j < k >= 3");
    return top_simplex_constant(cfg.k, cfg.n) * radius_fraction(cfg.k, cfg, r0) * density_scale(cfg) * area;
  }
  double total = 0.0;
  for (int m = j; m <= cfg.k; ++m) {
    double inner = 0.0;
    for (int ell = 0; ell <= j; ++ell) inner += binomial(m - ell, m - j) * interval_constant({ell, m}, cfg.k, cfg.n);
    total += radius_fraction(m, cfg, r0) * inner;
  }
  return total * density_scale(cfg) * area;
}

/// Large-n behaviour of the one-dimensional constants.
struct AsymptoticLimits1D {
  double critical_vertex = 0.0;  ///< sqrt(e)
  double vertex_edge = 0.0;      ///< sqrt(e) (sqrt(2) - 1)
  double vertex = 0.0;           ///< sqrt(2 e)

  struct Sample {
    int n = 0;
    double critical_vertex = 0.0;
    double vertex_edge = 0.0;
    double vertex = 0.0;
  };
  std::vector<Sample> samples;
};

inline AsymptoticLimits1D asymptotic_limits_1d(const std::vector<int>& ns = {100, 1000, 10000}) {
  AsymptoticLimits1D out;
  const double root_e = std::sqrt(std::numbers::e);
  out.critical_vertex = root_e;
  out.vertex_edge = root_e * (std::numbers::sqrt2 - 1.0);
  out.vertex = std::sqrt(2.0 * std::numbers::e);
  for (int n : ns) {
    AsymptoticLimits1D::Sample s;
    s.n = n;
    s.critical_vertex = critical_vertex_constant_1d(n);
    s.vertex_edge = vertex_edge_constant_1d(n);
    s.vertex = s.critical_vertex + s.vertex_edge;
    out.samples.push_back(s);
  }
  return out;
}

}  // namespace constants
}  // namespace anchormosaic
