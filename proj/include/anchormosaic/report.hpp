#pragma once

// JSON and CSV serialization of reports and mosaics.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "anchormosaic/experiments.hpp"

namespace anchormosaic {

inline constexpr const char* kReportSchema = "anchormosaic.report/1";
inline constexpr const char* kMosaicSchema = "anchormosaic.mosaic/1";

/// Finite doubles as numbers; infinities and NaN as null.
inline nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const AuditReport& a) {
  return {{"checks", a.checks}, {"violations", a.violations}, {"ok", a.ok()}};
}

inline nlohmann::json to_json(const RateRow& r) {
  nlohmann::json j{{"kind", r.kind}};
  if (r.kind == "interval") {
    j["ell"] = r.ell;
    j["m"] = r.m;
  } else {
    j["dim"] = r.m;
  }
  j["count"] = r.count;
  j["rate"] = json_number(r.rate);
  j["se"] = json_number(r.se);
  j["predicted"] = json_number(r.predicted);
  j["z"] = json_number(r.z);
  return j;
}

/// Largest |z| over interval rows with a defined z.
inline double max_abs_z(const ExperimentReport& rep) {
  double worst = 0.0;
  for (const auto& r : rep.intervals) {
    if (std::isfinite(r.z)) worst = std::max(worst, std::abs(r.z));
  }
  return worst;
}

inline nlohmann::json to_json(const ExperimentReport& rep, bool timing = false) {
  nlohmann::json cfg = rep.config;
  cfg.erase("replicate_index");
  cfg["replicates"] = rep.replicates;
  cfg["r0"] = json_number(rep.r0);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.intervals) rows.push_back(to_json(r));
  nlohmann::json srows = nlohmann::json::array();
  for (const auto& r : rep.simplices) srows.push_back(to_json(r));
  const AuditReport reconcile = reconcile_simplex_counts(rep);
  nlohmann::json j{{"schema", kReportSchema},
                   {"command", "simulate"},
                   {"config", cfg},
                   {"recommended_buffer", rep.recommended_buffer},
                   {"total_points", rep.total_points},
                   {"intervals", rows},
                   {"simplices", srows},
                   {"reconciliation", to_json(reconcile)},
                   {"max_abs_z", max_abs_z(rep)},
                   {"warnings", rep.warnings}};
  if (rep.audit.checks > 0) j["audit"] = to_json(rep.audit);
  if (timing) j["runtime_seconds"] = rep.runtime_seconds;
  return j;
}

/// CSV, one row per interval type and per simplex dimension. Columns:
/// type,ell,m,count,rate,se,predicted,z. Simplex rows leave ell empty and put
/// the dimension in m.
inline std::string to_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os.precision(17);
  auto num = [](double v) {
    if (!std::isfinite(v)) return std::string();
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  os << "type,ell,m,count,rate,se,predicted,z\n";
  for (const auto& r : rep.intervals) {
    os << "interval," << r.ell << ',' << r.m << ',' << r.count << ',' << num(r.rate) << ',' << num(r.se) << ','
       << num(r.predicted) << ',' << num(r.z) << '\n';
  }
  for (const auto& r : rep.simplices) {
    os << "simplex,," << r.m << ',' << r.count << ',' << num(r.rate) << ',' << num(r.se) << ',' << num(r.predicted)
       << ',' << num(r.z) << '\n';
  }
  return os.str();
}

inline nlohmann::json to_json(const stats::Estimate& e) {
  return {{"value", json_number(e.value)}, {"se", json_number(e.standard_error)},
          {"ci95", {json_number(e.lower()), json_number(e.upper())}}};
}

inline nlohmann::json to_json(const BpResult& r) {
  return {{"n", r.config.n},
          {"k", r.config.k},
          {"m", r.config.m},
          {"function", r.config.function == TestFunction::Gaussian ? "gaussian" : "bump"},
          {"samples", r.config.samples},
          {"seed", r.config.seed},
          {"left", to_json(r.left)},
          {"right", to_json(r.right)},
          {"analytic", r.analytic},
          {"overlap", r.overlap},
          {"left_covers_analytic", r.left_covers_analytic},
          {"right_covers_analytic", r.right_covers_analytic}};
}

// ---------------------------------------------------------------------------
// Mosaic dumps

namespace report_detail {

inline nlohmann::json vec(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline nlohmann::json interval_json(const Interval& iv, std::size_t id) {
  nlohmann::json members = nlohmann::json::array();
  for (auto s : iv.members) members.push_back({s.dim, s.index});
  return {{"id", id},
          {"type", {iv.type.ell, iv.type.m}},
          {"lower", {iv.lower.dim, iv.lower.index}},
          {"upper", {iv.upper.dim, iv.upper.index}},
          {"radius", iv.sphere.radius},
          {"anchor", vec(iv.sphere.anchor)},
          {"members", members}};
}

}  // namespace report_detail

/// Vertices carry the index of their generator in the input; simplices are
/// addressed by (dimension, index).
inline nlohmann::json to_json(const Mosaic1D& m) {
  nlohmann::json vs = nlohmann::json::array(), es = nlohmann::json::array(), ivs = nlohmann::json::array();
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const auto& v = m.vertices[i];
    const auto& g = m.generators[v.generator];
    vs.push_back({{"id", i},
                  {"generator", v.generator},
                  {"y", {g.x1}},
                  {"w", -g.x2 * g.x2},
                  {"cell", {json_number(v.cell_lo), json_number(v.cell_hi)}},
                  {"radius", v.radius},
                  {"anchor", {v.anchor}},
                  {"interval", v.interval}});
  }
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const auto& e = m.edges[i];
    es.push_back({{"id", i}, {"vertices", {e.left, e.right}}, {"radius", e.radius}, {"anchor", {e.anchor}}, {"interval", e.interval}});
  }
  for (std::size_t i = 0; i < m.intervals.size(); ++i) ivs.push_back(report_detail::interval_json(m.intervals[i], i));
  return {{"schema", kMosaicSchema}, {"k", 1}, {"vertices", vs}, {"edges", es}, {"triangles", nlohmann::json::array()}, {"intervals", ivs}};
}

inline nlohmann::json to_json(const Mosaic2D& m) {
  nlohmann::json vs = nlohmann::json::array(), es = nlohmann::json::array(), ts = nlohmann::json::array(),
                 ivs = nlohmann::json::array();
  for (std::size_t i = 0; i < m.vertex_data.size(); ++i) {
    const auto& p = m.tri.point(static_cast<int>(i));
    const auto& sd = m.vertex_data[i];
    vs.push_back({{"id", i},
                  {"generator", m.tri.vertices[i]},
                  {"y", report_detail::vec(p.y)},
                  {"w", p.w},
                  {"radius", sd.radius},
                  {"anchor", report_detail::vec(sd.anchor)},
                  {"interval", sd.interval}});
  }
  for (std::size_t i = 0; i < m.edge_data.size(); ++i) {
    const auto& sd = m.edge_data[i];
    es.push_back({{"id", i},
                  {"vertices", {m.tri.edges[i][0], m.tri.edges[i][1]}},
                  {"radius", sd.radius},
                  {"anchor", report_detail::vec(sd.anchor)},
                  {"interval", sd.interval}});
  }
  for (std::size_t i = 0; i < m.triangle_data.size(); ++i) {
    const auto& sd = m.triangle_data[i];
    const auto& t = m.tri.triangles[i];
    ts.push_back({{"id", i},
                  {"vertices", {t[0], t[1], t[2]}},
                  {"radius", sd.radius},
                  {"anchor", report_detail::vec(sd.anchor)},
                  {"interval", sd.interval}});
  }
  for (std::size_t i = 0; i < m.intervals.size(); ++i) ivs.push_back(report_detail::interval_json(m.intervals[i], i));
  return {{"schema", kMosaicSchema},
          {"k", 2},
          {"hidden", m.tri.hidden},
          {"vertices", vs},
          {"edges", es},
          {"triangles", ts},
          {"intervals", ivs}};
}

}  // namespace anchormosaic
