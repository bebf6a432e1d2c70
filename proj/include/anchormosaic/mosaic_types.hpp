#pragma once

#include <compare>
#include <string>
#include <vector>

#include "anchormosaic/constants.hpp"
#include "anchormosaic/geometry.hpp"

namespace anchormosaic {

/// A simplex of a mosaic, addressed by dimension and index in that dimension's list.
struct SimplexId {
  int dim = 0;
  int index = 0;

  friend constexpr bool operator==(SimplexId, SimplexId) = default;
  friend constexpr auto operator<=>(SimplexId, SimplexId) = default;
};

/// Interval [lower, upper] of the radius function; all members share one sphere.
struct Interval {
  SimplexId lower;
  SimplexId upper;
  IntervalType type;
  AnchoredSphere sphere;
  std::vector<SimplexId> members;
};

/// Closed real interval [lo, hi].
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double length() const { return hi - lo; }
};

/// Violations found by an exhaustive per-sample audit; empty means clean.
struct AuditReport {
  std::vector<std::string> violations;
  long checks = 0;

  bool ok() const { return violations.empty(); }
  void fail(std::string what) {
    if (violations.size() < 50) violations.push_back(std::move(what));
    else if (violations.size() == 50) violations.emplace_back("... further violations suppressed");
  }
  void merge(const AuditReport& other) {
    checks += other.checks;
    for (const auto& v : other.violations) fail(v);
  }
};

}  // namespace anchormosaic
