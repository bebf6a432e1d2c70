#pragma once

// Command-line front end. run_cli() is the whole program; tools/anchormosaic.cpp
// only forwards argv, which keeps every command testable in-process.
//
// Exit codes: 0 success, 1 usage or invalid configuration, 2 numerical or
// degeneracy failure, 3 a statistical or audit check failed.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "anchormosaic/report.hpp"

namespace anchormosaic::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kCheckFailed = 3 };

/// Sentinel thrown for bad option values that CLI11 cannot validate by itself.
struct UsageError : DomainError {
  using DomainError::DomainError;
};

namespace detail {

/// Comma-separated integers or ranges a..b, e.g. "3..10,20".
inline std::vector<int> parse_n_range(const std::string& s) {
  std::vector<int> out;
  auto to_int = [&](const std::string& t) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(t, &pos);
    } catch (const std::exception&) {
      throw UsageError("--n: cannot parse '" + s + "'");
    }
    if (pos != t.size()) throw UsageError("--n: cannot parse '" + s + "'");
    return v;
  };
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (const auto dots = part.find(".."); dots != std::string::npos) {
      const int a = to_int(part.substr(0, dots)), b = to_int(part.substr(dots + 2));
      if (b < a) throw UsageError("--n: empty range '" + part + "'");
      for (int n = a; n <= b; ++n) out.push_back(n);
    } else {
      out.push_back(to_int(part));
    }
  }
  if (out.empty()) throw UsageError("--n: empty list");
  return out;
}

/// "L" (cube [0,L]^k) or "AxB" ([0,A]x[0,B], k = 2 only).
inline Box parse_window(const std::string& s, int k) {
  std::vector<double> ext;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &pos);
    } catch (const std::exception&) {
      throw UsageError("--window: cannot parse '" + s + "'");
    }
    if (pos != part.size() || !(v > 0.0) || !std::isfinite(v)) throw UsageError("--window: bad extent in '" + s + "'");
    ext.push_back(v);
  }
  if (s.empty() || s.back() == 'x') throw UsageError("--window: cannot parse '" + s + "'");
  if (ext.size() == 1) ext.assign(k, ext[0]);
  if (static_cast<int>(ext.size()) != k) throw UsageError("--window: need 1 or k extents");
  return {std::vector<double>(k, 0.0), ext};
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + out_path);
  f << text;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct SampleFlags {
  int n = 2, k = 1;
  double rho = 1.0;
  std::string window = "100";
  std::optional<double> buffer;
  std::uint64_t seed = 0;

  void add_to(CLI::App* app) {
    app->add_option("--n", n, "ambient dimension")->check(CLI::Range(2, 64));
    app->add_option("--k", k, "slice dimension (1 or 2)")->check(CLI::Range(1, 2));
    app->add_option("--rho", rho, "intensity of the Poisson process")->check(CLI::PositiveNumber);
    app->add_option("--window", window, "window extents: L or AxB");
    app->add_option("--buffer", buffer, "sampling margin around the window (default: recommended)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "base seed; ANCHORMOSAIC_SEED overrides it");
  }

  SamplingConfig config() const {
    if (n <= k) throw UsageError("need n > k");
    SamplingConfig c;
    c.n = n;
    c.k = k;
    c.rho = rho;
    c.window = parse_window(window, k);
    c.seed = seed_from_env(seed);
    c.buffer = buffer.value_or(choose_buffer(c, kDefaultBufferQuantile));
    c.validate();
    return c;
  }
};

// ---------------------------------------------------------------------------

inline int cmd_constants(int k, const std::string& n_spec, std::optional<double> r0, const std::string& format,
                         const std::string& out_path, std::ostream& out) {
  if (r0 && !(*r0 >= 0.0)) throw UsageError("--r0 must be >= 0");
  const auto ns = parse_n_range(n_spec);
  const auto types = interval_types(k);
  std::vector<std::string> names;
  for (auto t : types) names.push_back("C" + std::to_string(t.ell) + std::to_string(t.m));
  for (int j = 0; j <= k; ++j) names.push_back("D" + std::to_string(j));
  if (r0) {
    const auto base = names;
    for (const auto& b : base) names.push_back("E_" + b);
  }
  std::vector<std::vector<double>> rows;
  for (int n : ns) {
    const DimensionConfig d{n, k, 1.0};
    d.validate();
    std::vector<double> row;
    for (auto t : types) row.push_back(constants::interval_constant(t, k, n));
    for (int j = 0; j <= k; ++j) row.push_back(constants::simplex_constant(j, k, n));
    if (r0) {
      for (auto t : types) row.push_back(constants::expected_interval_count(t, d, 1.0, *r0));
      for (int j = 0; j <= k; ++j) row.push_back(constants::expected_simplex_count(j, d, 1.0, *r0));
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream os;
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < ns.size(); ++i) {
      nlohmann::json r{{"n", ns[i]}};
      for (std::size_t c = 0; c < names.size(); ++c) r[names[c]] = rows[i][c];
      arr.push_back(r);
    }
    nlohmann::json j{{"schema", kReportSchema}, {"command", "constants"}, {"k", k}, {"r0", r0 ? json_number(*r0) : nullptr},
                     {"rows", arr}};
    os << dump(j);
  } else if (format == "csv") {
    os << "n";
    for (const auto& nm : names) os << ',' << nm;
    os << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      os << ns[i];
      for (double v : rows[i]) os << ',' << v;
      os << '\n';
    }
  } else {
    os << std::setw(6) << "n";
    for (const auto& nm : names) os << std::setw(10) << nm;
    os << '\n' << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      os << std::setw(6) << ns[i];
      for (double v : rows[i]) os << std::setw(10) << v;
      os << '\n';
    }
    if (r0) os << "E columns: expected counts per unit rho^(k/n)|R| with radius at most r0 = " << *r0 << '\n';
  }
  emit(os.str(), out_path, out);
  return kOk;
}

inline int cmd_simulate(const SampleFlags& f, std::optional<double> r0, int reps, const std::string& format,
                        const std::string& out_path, bool timing, bool audit, double z_limit, unsigned threads,
                        std::ostream& out, std::ostream& err) {
  if (reps < 1) throw UsageError("--reps must be >= 1");
  if (r0 && !(*r0 >= 0.0)) throw UsageError("--r0 must be >= 0");
  const SamplingConfig cfg = f.config();
  ExperimentOptions opt;
  opt.audit = audit;
  opt.threads = threads;
  const ExperimentReport rep = estimate_interval_rates(cfg, reps, r0, opt);
  for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
  emit(format == "csv" ? to_csv(rep) : dump(to_json(rep, timing)), out_path, out);

  bool ok = reconcile_simplex_counts(rep).ok() && rep.audit.ok();
  if (reps >= 2) ok = ok && max_abs_z(rep) <= z_limit;
  for (const auto& row : rep.intervals) {
    if (reps >= 2 && std::isnan(row.z)) ok = false;
  }
  return ok ? kOk : kCheckFailed;
}

inline int cmd_verify_bp(int n, int k, int m, double samples, const std::string& function, std::uint64_t seed,
                         unsigned threads, const std::string& out_path, std::ostream& out) {
  if (!(samples >= 2.0) || samples > 1e10) throw UsageError("--samples must lie in [2, 1e10]");
  if (function != "gaussian" && function != "bump") throw UsageError("--function must be gaussian or bump");
  BpConfig c;
  c.n = n;
  c.k = k;
  c.m = m;
  c.samples = static_cast<long long>(samples);
  c.function = function == "gaussian" ? TestFunction::Gaussian : TestFunction::Bump;
  c.seed = seed_from_env(seed);
  c.threads = threads;
  const BpResult r = verify_bp_identity(c);
  bool pass = r.overlap;
  // With m = k = n the left side is an exact Gaussian or bump integral.
  if (m == k && k == n) pass = pass && r.right_covers_analytic;
  nlohmann::json j = to_json(r);
  j["schema"] = kReportSchema;
  j["command"] = "verify bp";
  j["pass"] = pass;
  emit(dump(j), out_path, out);
  return pass ? kOk : kCheckFailed;
}

inline int cmd_verify_angle(int n, const std::string& out_path, std::ostream& out) {
  if (n < 2) throw UsageError("--n must be >= 2");
  const auto r = verify_angle_integral(n);
  const double tol = 1e-8 * std::max(1.0, std::abs(r.closed_form));
  const bool pass = std::abs(r.quadrature - r.closed_form) <= tol && std::abs(r.quadrature_swapped - r.closed_form) <= tol;
  nlohmann::json j{{"schema", kReportSchema},
                   {"command", "verify angle"},
                   {"n", n},
                   {"quadrature", r.quadrature},
                   {"quadrature_swapped", r.quadrature_swapped},
                   {"closed_form", r.closed_form},
                   {"tolerance", tol},
                   {"pass", pass}};
  emit(dump(j), out_path, out);
  return pass ? kOk : kCheckFailed;
}

inline int cmd_verify_gamma(int draws, std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  if (draws < 1) throw UsageError("--draws must be >= 1");
  const auto ds = verify_gamma_lemma(draws, seed_from_env(seed));
  double worst = 0.0;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : ds) {
    worst = std::max(worst, d.relative_error());
    arr.push_back({{"j", d.j}, {"p", d.p}, {"c", d.c}, {"t0", d.t0}, {"closed_form", d.closed_form},
                   {"quadrature", d.quadrature}, {"relative_error", d.relative_error()}});
  }
  const bool pass = worst <= 1e-9;
  nlohmann::json j{{"schema", kReportSchema}, {"command", "verify gamma-lemma"}, {"draws", arr},
                   {"max_relative_error", worst}, {"tolerance", 1e-9}, {"pass", pass}};
  emit(dump(j), out_path, out);
  return pass ? kOk : kCheckFailed;
}

inline int cmd_verify_beta(int n, int k, double samples, std::uint64_t seed, const std::string& out_path,
                           std::ostream& out) {
  if (!(1 <= k && k < n)) throw UsageError("need 1 <= k < n");
  if (!(samples >= 10.0) || samples > 1e8) throw UsageError("--samples must lie in [10, 1e8]");
  const auto r = verify_beta_law(n, k, static_cast<std::size_t>(samples), seed_from_env(seed));
  const bool pass = r.derived.p_value > 0.01;
  auto ks = [](const stats::KsResult& x) { return nlohmann::json{{"statistic", x.statistic}, {"p_value", x.p_value}}; };
  nlohmann::json j{{"schema", kReportSchema},
                   {"command", "verify beta-law"},
                   {"n", n},
                   {"k", k},
                   {"samples", r.samples},
                   {"derived", ks(r.derived)},
                   {"alternative", ks(r.alternative)},
                   {"pass", pass}};
  emit(dump(j), out_path, out);
  return pass ? kOk : kCheckFailed;
}

/// Points either sampled from the flags or read from a JSON file
/// {"points": [[x1, ..., xn], ...]}.
inline int cmd_mosaic(const SampleFlags& f, const std::string& input, bool audit, const std::string& out_path,
                      std::ostream& out) {
  std::vector<PointN> pts;
  int k = f.k;
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) throw UsageError("cannot open input file " + input);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("input is not valid JSON: ") + e.what());
    }
    if (!j.contains("points") || !j["points"].is_array()) throw UsageError("input needs a 'points' array");
    for (const auto& p : j["points"]) {
      const auto v = p.get<std::vector<double>>();
      if (static_cast<int>(v.size()) <= k) throw UsageError("input points need more than k coordinates");
      if (!pts.empty() && pts.front().dim() != static_cast<int>(v.size())) {
        throw UsageError("input points have mixed dimensions");
      }
      pts.emplace_back(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))));
    }
  } else {
    pts = sample_poisson_box(f.config());
  }
  nlohmann::json j;
  AuditReport a;
  if (k == 1) {
    const auto hp = rotate_to_halfplane(std::span<const PointN>(pts));
    double lo = 0.0, hi = 0.0;
    if (input.empty()) {
      const Box w = parse_window(f.window, 1);
      lo = w.lo[0];
      hi = w.hi[0];
    } else if (!pts.empty()) {
      lo = hi = pts[0][0];
      for (const auto& p : pts) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
    }
    const auto m = radius_and_intervals_1d(build_1d(hp, {lo, hi}), hp);
    j = to_json(m);
    if (audit) a = audit_1d(m, hp);
  } else {
    if (pts.size() < 3) throw UsageError("a 2D mosaic needs at least three points");
    const auto m = build_2d(pts);
    j = to_json(m);
    if (audit) a = audit_2d(m, pts);
  }
  j["n"] = pts.empty() ? f.n : pts.front().dim();
  if (audit) j["audit"] = to_json(a);
  emit(dump(j), out_path, out);
  return a.ok() ? kOk : kCheckFailed;
}

}  // namespace detail

/// Parses argv and runs one command. Never throws.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Slice mosaics of Poisson-Delaunay mosaics: constants, simulation and identity checks", "anchormosaic"};
  app.require_subcommand(1);
  std::string out_path;
  unsigned threads = 0;

  // constants
  int ck = 1;
  std::string cn = "2..9";
  std::optional<double> cr0;
  std::string cformat = "table";
  auto* constants = app.add_subcommand("constants", "print the closed-form constants for a range of n");
  constants->add_option("--k", ck, "slice dimension (1 or 2)")->check(CLI::Range(1, 2));
  constants->add_option("--n", cn, "n values: a..b, a,b,c or a single value");
  constants->add_option("--r0", cr0, "also print expected counts with radius at most r0");
  constants->add_option("--format", cformat, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  constants->add_option("--out", out_path, "output file (default stdout)");

  // simulate
  detail::SampleFlags sf;
  std::optional<double> sr0;
  int reps = 10;
  std::string sformat = "json";
  bool timing = false, saudit = false;
  double z_limit = 3.0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rates compared with the closed forms");
  sf.add_to(simulate);
  simulate->add_option("--r0", sr0, "count only intervals with radius at most r0");
  simulate->add_option("--reps", reps, "number of replicates")->check(CLI::PositiveNumber);
  simulate->add_option("--format", sformat, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--out", out_path, "output file (default stdout)");
  simulate->add_flag("--timing", timing, "include wall time in the JSON report (breaks byte-identity)");
  simulate->add_flag("--audit", saudit, "run the exhaustive per-sample audits");
  simulate->add_option("--z-limit", z_limit, "largest accepted |z| of an interval rate")->check(CLI::PositiveNumber);
  simulate->add_option("--threads", threads, "worker threads (0: all cores)");

  // verify
  auto* verify = app.add_subcommand("verify", "check an identity numerically");
  verify->require_subcommand(1);
  int vn = 2, vk = 1, vm = 1, draws = 100;
  double samples = 1e6;
  std::string function = "gaussian";
  std::uint64_t vseed = 0;
  auto* bp = verify->add_subcommand("bp", "two-sided Monte Carlo of the change of variables");
  bp->add_option("--n", vn)->check(CLI::Range(1, 6));
  bp->add_option("--k", vk)->check(CLI::Range(1, 6));
  bp->add_option("--m", vm)->check(CLI::Range(0, 6));
  bp->add_option("--samples", samples, "samples per side (accepts 1e7)");
  bp->add_option("--function", function, "gaussian or bump");
  bp->add_option("--seed", vseed);
  bp->add_option("--threads", threads);
  bp->add_option("--out", out_path);
  auto* angle = verify->add_subcommand("angle", "quadrature of the two-angle integral against its closed form");
  angle->add_option("--n", vn)->check(CLI::Range(2, 1000));
  angle->add_option("--out", out_path);
  auto* gamma = verify->add_subcommand("gamma-lemma", "power-exponential integral against quadrature");
  gamma->add_option("--draws", draws)->check(CLI::Range(1, 100000));
  gamma->add_option("--seed", vseed);
  gamma->add_option("--out", out_path);
  auto* beta = verify->add_subcommand("beta-law", "KS test of the projected-norm law");
  beta->add_option("--n", vn)->check(CLI::Range(2, 1000));
  beta->add_option("--k", vk)->check(CLI::Range(1, 999));
  beta->add_option("--samples", samples);
  beta->add_option("--seed", vseed);
  beta->add_option("--out", out_path);

  // mosaic
  detail::SampleFlags mf;
  std::string input;
  bool maudit = false;
  auto* mosaic = app.add_subcommand("mosaic", "build one slice mosaic and dump it as JSON");
  mf.add_to(mosaic);
  mosaic->add_option("--input", input, "JSON file with a 'points' array instead of sampling");
  mosaic->add_flag("--audit", maudit, "run the exhaustive audit");
  mosaic->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (*constants) return detail::cmd_constants(ck, cn, cr0, cformat, out_path, out);
    if (*simulate) {
      return detail::cmd_simulate(sf, sr0, reps, sformat, out_path, timing, saudit, z_limit, threads, out, err);
    }
    if (*mosaic) return detail::cmd_mosaic(mf, input, maudit, out_path, out);
    if (*bp) return detail::cmd_verify_bp(vn, vk, vm, samples, function, vseed, threads, out_path, out);
    if (*angle) return detail::cmd_verify_angle(vn, out_path, out);
    if (*gamma) return detail::cmd_verify_gamma(draws, vseed, out_path, out);
    if (*beta) return detail::cmd_verify_beta(vn, vk, samples, vseed, out_path, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace anchormosaic::cli
