#pragma once

// Special functions used by the expectation formulas: log-Gamma, the
// regularized incomplete Gamma function and its inverse, complete and
// incomplete Beta functions, the (regularized) generalized hypergeometric
// function 3F2, and the power-exponential integral
//     int_0^t0 t^(j-1) exp(-c t^p) dt.
//
// Everything is double precision and pure. Gamma products are formed in log
// space so parameters in the tens of thousands do not overflow.

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "anchormosaic/error.hpp"

namespace anchormosaic::specfun {

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

inline bool is_nonpositive_integer(double v) {
  return v <= 0.0 && std::floor(v) == v;
}

}  // namespace detail

/// Signed log-Gamma: returns log|Gamma(x)| and writes the sign of Gamma(x).
/// Thread-safe (does not touch the global `signgam`).
inline double log_gamma(double x, int* sign) {
  int s = 1;
  const double v = ::lgamma_r(x, &s);
  if (sign != nullptr) *sign = s;
  return v;
}

inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    int s = 1;
    const double v = log_gamma(x, &s);
    if (s < 0) throw DomainError("log_gamma: Gamma(x) is negative, use the signed overload");
    return v;
  }
  return log_gamma(x, nullptr);
}

inline double gamma_fn(double x) { return std::tgamma(x); }

/// P(a, x) = gamma(a, x) / Gamma(a).
///
/// Power series for x < a + 1 and a modified-Lentz continued fraction for the
/// complement otherwise.
inline double regularized_lower_gamma(double a, double x) {
  detail::require_finite(a, "regularized_lower_gamma");
  if (std::isnan(x)) throw DomainError("regularized_lower_gamma: NaN argument");
  if (!(a > 0.0)) throw DomainError("regularized_lower_gamma: shape must be positive");
  if (x < 0.0) throw DomainError("regularized_lower_gamma: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 100000;
  const double log_prefactor = a * std::log(x) - x - log_gamma(a);

  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIter; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) {
        return std::min(1.0, sum * std::exp(log_prefactor));
      }
    }
    throw IterationCapError("regularized_lower_gamma: series did not converge");
  }

  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      const double q = std::exp(log_prefactor) * h;
      return std::max(0.0, 1.0 - q);
    }
  }
  throw IterationCapError("regularized_lower_gamma: continued fraction did not converge");
}

/// Q(a, x) = 1 - P(a, x), computed without cancellation for large x.
inline double regularized_upper_gamma(double a, double x) {
  detail::require_finite(a, "regularized_upper_gamma");
  if (!(a > 0.0)) throw DomainError("regularized_upper_gamma: shape must be positive");
  if (std::isnan(x) || x < 0.0) throw DomainError("regularized_upper_gamma: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - regularized_lower_gamma(a, x);

  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return std::exp(a * std::log(x) - x - log_gamma(a)) * h;
    }
  }
  throw IterationCapError("regularized_upper_gamma: continued fraction did not converge");
}

/// Smallest x with P(a, x) >= p, by bisection. p in (0, 1).
inline double inverse_regularized_lower_gamma(double a, double p) {
  if (!(a > 0.0)) throw DomainError("inverse_regularized_lower_gamma: shape must be positive");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse_regularized_lower_gamma: p must lie in (0,1)");
  double lo = 0.0;
  double hi = std::max(1.0, a);
  while (regularized_lower_gamma(a, hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("inverse_regularized_lower_gamma: bracket overflow");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_lower_gamma(a, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double log_beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_fn: parameters must be positive");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

inline double beta_fn(double a, double b) {
  detail::require_finite(a, "beta_fn");
  detail::require_finite(b, "beta_fn");
  return std::exp(log_beta_fn(a, b));
}

namespace detail {

// Continued fraction for the regularized incomplete Beta function (modified Lentz).
inline double beta_continued_fraction(double t, double a, double b) {
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * t / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 100000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * t / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * t / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw IterationCapError("regularized_beta: continued fraction did not converge");
}

}  // namespace detail

/// I_t(a, b) = B(t; a, b) / B(a, b).
inline double regularized_beta(double t, double a, double b) {
  detail::require_finite(t, "regularized_beta");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("regularized_beta: parameters must be positive");
  if (t < 0.0 || t > 1.0) throw DomainError("regularized_beta: t must lie in [0,1]");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  const double log_front =
      a * std::log(t) + b * std::log1p(-t) - log_beta_fn(a, b);
  if (t < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * detail::beta_continued_fraction(t, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * detail::beta_continued_fraction(1.0 - t, b, a) / b;
}

/// Incomplete Beta function B(t0; a, b) = int_0^t0 t^(a-1) (1-t)^(b-1) dt.
inline double beta_inc(double t0, double a, double b) {
  return regularized_beta(t0, a, b) * beta_fn(a, b);
}

/// Outcome of a 3F2 evaluation, kept for diagnostics.
struct HypergeometricSum {
  double value = 0.0;     ///< sum of the series (not regularized)
  long terms = 0;         ///< number of explicit terms summed
  double tail = 0.0;      ///< analytic tail estimate added at z = 1
  bool terminated = false;
};

/// Generalized hypergeometric series 3F2(a; b; z) for z in [0, 1].
///
/// Terms are accumulated by their ratio recursion and summation stops once
/// three consecutive terms fall below 1e-14 of the partial sum (and, for z < 1,
/// the geometric tail bound does too). At z = 1 the remaining tail decays only
/// algebraically, like j^-(s+1) with s = b1 + b2 - a1 - a2 - a3, so it is added
/// as the integral of the continuous term function from J + 1/2 to infinity.
inline HypergeometricSum hyp3f2_series(const std::array<double, 3>& a,
                                       const std::array<double, 2>& b, double z) {
  for (double v : a) detail::require_finite(v, "hyp3f2");
  for (double v : b) {
    detail::require_finite(v, "hyp3f2");
    if (detail::is_nonpositive_integer(v)) {
      throw DomainError("hyp3f2: lower parameters must not be non-positive integers");
    }
  }
  detail::require_finite(z, "hyp3f2");
  if (z < 0.0 || z > 1.0) throw DomainError("hyp3f2: z must lie in [0,1]");

  bool terminating = false;
  for (double v : a) terminating = terminating || detail::is_nonpositive_integer(v);
  const double excess = b[0] + b[1] - a[0] - a[1] - a[2];
  if (z == 1.0 && !terminating && !(excess > 0.0)) {
    throw ConvergenceError("hyp3f2: divergent at z = 1 (need b1 + b2 > a1 + a2 + a3)");
  }

  constexpr double kRelEps = 1e-14;
  constexpr long kMaxTerms = 1000000;
  HypergeometricSum out;
  double term = 1.0;
  double sum = 1.0;
  int small_run = 0;
  long j = 0;
  for (; j < kMaxTerms; ++j) {
    const double jd = static_cast<double>(j);
    const double ratio = (jd + a[0]) * (jd + a[1]) * (jd + a[2]) /
                         ((jd + b[0]) * (jd + b[1]) * (jd + 1.0)) * z;
    term *= ratio;
    if (term == 0.0) {
      out.terminated = true;
      break;
    }
    sum += term;
    if (std::abs(term) < kRelEps * std::abs(sum)) {
      ++small_run;
    } else {
      small_run = 0;
    }
    if (small_run >= 3) {
      if (z < 1.0) {
        const double r = std::abs(ratio);
        if (r < 1.0 && std::abs(term) * r / (1.0 - r) < kRelEps * std::abs(sum)) break;
      } else {
        break;
      }
    }
  }
  if (j >= kMaxTerms) {
    throw IterationCapError("hyp3f2: iteration cap reached before convergence");
  }
  out.terms = j + 1;

  if (!out.terminated && z == 1.0) {
    // `term` is the term of index J = j + 1; approximate sum_{i > J} t(i) by
    // int_{J+1/2}^inf t(x) dx with t(x) the Gamma-function continuation.
    const double big_j = static_cast<double>(j + 1);
    bool safe = true;
    for (double v : a) safe = safe && (big_j + v > 0.0);
    for (double v : b) safe = safe && (big_j + v > 0.0);
    if (safe) {
      auto log_shape = [&](double x) {
        return log_gamma(x + a[0]) + log_gamma(x + a[1]) + log_gamma(x + a[2]) -
               log_gamma(x + b[0]) - log_gamma(x + b[1]) - log_gamma(x + 1.0);
      };
      const double ref = log_shape(big_j);
      const double x0 = big_j + 0.5;
      // x = x0 * u^(-1/s) turns the algebraic tail into a nearly constant integrand.
      auto integrand = [&](double u) {
        const double x = x0 * std::pow(u, -1.0 / excess);
        const double dxdu = x0 / excess * std::pow(u, -1.0 / excess - 1.0);
        return std::exp(log_shape(x) - ref) * dxdu;
      };
      const double tail_rel = boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, 1.0);
      out.tail = term * tail_rel;
      sum += out.tail;
    }
  }
  out.value = sum;
  return out;
}

inline double hyp3f2(const std::array<double, 3>& a, const std::array<double, 2>& b, double z) {
  return hyp3f2_series(a, b, z).value;
}

/// Log of |1 / (Gamma(b1) Gamma(b2))| together with its sign; the factor that
/// turns 3F2 into its regularized form.
inline double log_regularizer(const std::array<double, 2>& b, int* sign) {
  int s0 = 1;
  int s1 = 1;
  const double v = -(log_gamma(b[0], &s0) + log_gamma(b[1], &s1));
  *sign = s0 * s1;
  return v;
}

/// Regularized 3F2: the series divided by Gamma(b1) Gamma(b2).
inline double regularized_hyp3f2(double a1, double a2, double a3, double b1, double b2, double z) {
  const std::array<double, 3> a{a1, a2, a3};
  const std::array<double, 2> b{b1, b2};
  const double s = hyp3f2(a, b, z);
  int sign = 1;
  const double log_reg = log_regularizer(b, &sign);
  return sign * s * std::exp(log_reg);
}

/// int_0^t0 t^(j-1) exp(-c t^p) dt.
///
/// For p > 0 this is gamma(j/p, c t0^p) / (p c^(j/p)). For p < 0 the
/// substitution u = c t^p reverses the limits and the upper incomplete Gamma
/// function appears instead. t0 may be +infinity.
inline double power_exp_integral(double j, double p, double c, double t0) {
  detail::require_finite(j, "power_exp_integral");
  detail::require_finite(p, "power_exp_integral");
  detail::require_finite(c, "power_exp_integral");
  if (std::isnan(t0)) throw DomainError("power_exp_integral: NaN t0");
  if (p == 0.0) throw DomainError("power_exp_integral: p must be non-zero");
  if (!(t0 > 0.0)) throw DomainError("power_exp_integral: t0 must be positive");
  if (!(c > 0.0)) throw DomainError("power_exp_integral: c must be positive");
  const double shape = j / p;
  if (!(shape > 0.0)) throw DomainError("power_exp_integral: j/p must be positive");
  const double log_scale = log_gamma(shape) - std::log(std::abs(p)) - shape * std::log(c);
  if (p > 0.0) {
    const double x = std::isinf(t0) ? t0 : c * std::pow(t0, p);
    return regularized_lower_gamma(shape, x) * std::exp(log_scale);
  }
  if (std::isinf(t0)) return std::exp(log_scale);
  return regularized_upper_gamma(shape, c * std::pow(t0, p)) * std::exp(log_scale);
}

}  // namespace anchormosaic::specfun
