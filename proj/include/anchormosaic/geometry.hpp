#pragma once

// Dimension-generic geometric kernel for slices of point sets in R^n.
//
// The slice R^k is always spanned by the first k coordinate axes. A point x in
// R^n induces the weighted point (y, w) in R^k with y the first k coordinates
// and w = -(squared distance of x to R^k). The power of a point z in R^k from
// (y, w) is |z - y|^2 - w, which equals the squared distance in R^n from the
// embedded z to x.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anchormosaic/constants.hpp"
#include "anchormosaic/error.hpp"

namespace anchormosaic {

/// A point of the ambient space R^n.
struct PointN {
  Eigen::VectorXd coords;

  PointN() = default;
  explicit PointN(Eigen::VectorXd c) : coords(std::move(c)) {}
  PointN(std::initializer_list<double> c) : coords(static_cast<Eigen::Index>(c.size())) {
    Eigen::Index i = 0;
    for (double v : c) coords[i++] = v;
  }

  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[i]; }
  double& operator[](int i) { return coords[i]; }
};

/// Projection of a point to R^k, weighted by minus its squared distance to R^k.
struct WeightedPoint {
  Eigen::VectorXd y;
  double w = 0.0;
  PointN preimage;

  int dim() const { return static_cast<int>(y.size()); }
};

/// Sphere in R^n whose center (the anchor) lies in R^k.
struct AnchoredSphere {
  Eigen::VectorXd anchor;
  double radius = 0.0;

  double radius_squared() const { return radius * radius; }
};

inline double power_distance(const Eigen::VectorXd& z, const WeightedPoint& p) {
  return (z - p.y).squaredNorm() - p.w;
}

inline WeightedPoint project_to_slice(const PointN& x, int k) {
  if (k < 0 || k > x.dim()) throw DomainError("project_to_slice: need 0 <= k <= n");
  WeightedPoint out;
  out.y = x.coords.head(k);
  out.w = -x.coords.tail(x.dim() - k).squaredNorm();
  out.preimage = x;
  return out;
}

inline std::vector<WeightedPoint> project_to_slice(std::span<const PointN> xs, int k) {
  std::vector<WeightedPoint> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(project_to_slice(x, k));
  return out;
}

namespace geometry_detail {

// Columns y_i - y_0 of the projected simplex.
inline Eigen::MatrixXd edge_matrix(std::span<const WeightedPoint> pts) {
  const int k = pts.front().dim();
  const int m = static_cast<int>(pts.size()) - 1;
  Eigen::MatrixXd d(k, m);
  for (int i = 0; i < m; ++i) d.col(i) = pts[i + 1].y - pts[0].y;
  return d;
}

inline double diameter(std::span<const WeightedPoint> pts) {
  double diam = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) diam = std::max(diam, (pts[i].y - pts[j].y).norm());
  }
  return diam;
}

// Householder QR of the edge matrix with a relative rank test on diag(R).
struct ThinQr {
  Eigen::MatrixXd q;  // k x m, orthonormal columns
  Eigen::MatrixXd r;  // m x m, upper triangular
};

inline ThinQr thin_qr(const Eigen::MatrixXd& d, double rel_tol, const char* who) {
  const auto m = d.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(d);
  ThinQr out;
  out.q = qr.householderQ() * Eigen::MatrixXd::Identity(d.rows(), m);
  out.r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const double scale = d.colwise().norm().maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(std::abs(out.r(i, i)) > rel_tol * scale)) {
      throw DegeneracyError(std::string(who) + ": projected points are affinely dependent");
    }
  }
  return out;
}

}  // namespace geometry_detail

/// Smallest sphere centred in R^k through the preimages of m+1 weighted points.
///
/// The equal-power conditions cut out a (k-m)-flat of centres; the squared
/// radius |z - y_0|^2 - w_0 is minimized on it by the orthogonal projection of
/// y_0, which lies in the affine hull of the projections.
inline AnchoredSphere smallest_anchored_circumsphere(std::span<const WeightedPoint> pts, double rel_tol = 1e-9) {
  if (pts.empty()) throw DomainError("smallest_anchored_circumsphere: no points");
  const int k = pts.front().dim();
  const int m = static_cast<int>(pts.size()) - 1;
  if (m > k) throw DomainError("smallest_anchored_circumsphere: more than k+1 points");
  AnchoredSphere s;
  if (m == 0) {
    s.anchor = pts[0].y;
    s.radius = std::sqrt(std::max(0.0, -pts[0].w));
    return s;
  }
  const Eigen::MatrixXd d = geometry_detail::edge_matrix(pts);
  const auto qr = geometry_detail::thin_qr(d, rel_tol, "smallest_anchored_circumsphere");
  Eigen::VectorXd half_g(m);
  for (int i = 0; i < m; ++i) half_g[i] = 0.5 * (d.col(i).squaredNorm() - pts[i + 1].w + pts[0].w);
  // D^T (z - y0) = g/2 with z - y0 = Q t  =>  R^T t = g/2.
  const Eigen::VectorXd t = qr.r.transpose().triangularView<Eigen::Lower>().solve(half_g);
  s.anchor = pts[0].y + qr.q * t;
  s.radius = std::sqrt(std::max(0.0, power_distance(s.anchor, pts[0])));
  return s;
}

inline AnchoredSphere smallest_anchored_circumsphere(std::span<const PointN> pts, int k, double rel_tol = 1e-9) {
  const auto wps = project_to_slice(pts, k);
  return smallest_anchored_circumsphere(std::span<const WeightedPoint>(wps), rel_tol);
}

/// True iff no point of `cloud` outside `exclude` lies strictly inside the sphere
/// (distance < radius - tol, tol = rel_tol * max(1, radius)).
inline bool sphere_is_empty(const AnchoredSphere& s, std::span<const PointN> cloud,
                            std::span<const std::size_t> exclude = {}, double rel_tol = 1e-9) {
  const double tol = rel_tol * std::max(1.0, s.radius);
  const double limit = s.radius - tol;
  if (limit <= 0.0) return true;
  const double limit_sq = limit * limit;
  const auto k = s.anchor.size();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), i) != exclude.end()) continue;
    const auto& x = cloud[i].coords;
    const double d2 = (x.head(k) - s.anchor).squaredNorm() + x.tail(x.size() - k).squaredNorm();
    if (d2 < limit_sq) return false;
  }
  return true;
}

/// Barycentric coordinates of z with respect to the projected simplex, after
/// projecting z onto its affine hull. The residual distance is returned too.
inline std::pair<Eigen::VectorXd, double> barycentric_coordinates(const Eigen::VectorXd& z,
                                                                  std::span<const WeightedPoint> simplex,
                                                                  double rel_tol = 1e-9) {
  const int m = static_cast<int>(simplex.size()) - 1;
  Eigen::VectorXd lambda(m + 1);
  if (m == 0) {
    lambda[0] = 1.0;
    return {lambda, (z - simplex[0].y).norm()};
  }
  const Eigen::MatrixXd d = geometry_detail::edge_matrix(simplex);
  const auto qr = geometry_detail::thin_qr(d, rel_tol, "barycentric_coordinates");
  const Eigen::VectorXd rhs = qr.q.transpose() * (z - simplex[0].y);
  const Eigen::VectorXd beta = qr.r.triangularView<Eigen::Upper>().solve(rhs);
  const double residual = ((z - simplex[0].y) - qr.q * rhs).norm();
  lambda[0] = 1.0 - beta.sum();
  lambda.tail(m) = beta;
  return {lambda, residual};
}

/// Interval type the sphere assigns to the simplex it circumscribes as upper bound.
///
/// Facet i (opposite vertex i) is visible iff its hyperplane inside the affine
/// hull of the projections separates the anchor from vertex i, i.e. iff the
/// i-th barycentric coordinate of the anchor is negative. ell = m - #visible.
inline IntervalType visibility_type(const AnchoredSphere& s, std::span<const WeightedPoint> simplex,
                                    double rel_tol = 1e-9) {
  if (simplex.empty()) throw DomainError("visibility_type: empty simplex");
  const int m = static_cast<int>(simplex.size()) - 1;
  if (m > simplex.front().dim()) throw DomainError("visibility_type: simplex dimension exceeds k");
  if (m == 0) return {0, 0};
  const double scale = std::max(geometry_detail::diameter(simplex), 1e-300);
  auto [lambda, residual] = barycentric_coordinates(s.anchor, simplex, rel_tol);
  if (residual > 1e-6 * std::max(scale, s.radius)) {
    throw DomainError("visibility_type: anchor is not in the affine hull of the projected simplex");
  }
  int visible = 0;
  for (int i = 0; i <= m; ++i) {
    if (std::abs(lambda[i]) < rel_tol) {
      throw ToleranceError("visibility_type: anchor lies on a facet hyperplane");
    }
    if (lambda[i] < 0.0) ++visible;
  }
  return {m - visible, m};
}

/// Jacobian r^((n-1)(k+1)) k! Vol_k(u') of (y, r, u_0..u_k) -> (y + r u_i)_i, where
/// u' are the projections of the unit vectors u_i to R^k.
inline double bp_jacobian(double r, std::span<const Eigen::VectorXd> u, int k, int n) {
  if (static_cast<int>(u.size()) != k + 1) throw DomainError("bp_jacobian: need k+1 unit vectors");
  if (k < 0 || k > n) throw DomainError("bp_jacobian: need 0 <= k <= n");
  for (const auto& v : u) {
    if (v.size() != n) throw DomainError("bp_jacobian: vectors must live in R^n");
  }
  double volume_factor = 1.0;  // k! Vol_k(u')
  if (k > 0) {
    Eigen::MatrixXd d(k, k);
    for (int i = 0; i < k; ++i) d.col(i) = u[i + 1].head(k) - u[0].head(k);
    volume_factor = std::abs(d.determinant());
  }
  return std::pow(r, static_cast<double>((n - 1) * (k + 1))) * volume_factor;
}

}  // namespace anchormosaic
