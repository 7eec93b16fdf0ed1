#pragma once

// Per-check reports: one record per grid point, serialized with a fixed field order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/version.hpp>
#include <nlohmann/json.hpp>

namespace mirrorgamma {

inline constexpr const char* kVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

/// |a - b| / max(|a|, |b|, floor).
inline double rel_err(std::complex<double> a, std::complex<double> b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Comparison with a closed-form value; labeled so it is never mistaken for a two-sided result.
struct OracleRecord {
  std::string label;
  std::complex<double> value;
  double rel_err = 0.0;
  bool pass = false;
};

struct PointRecord {
  std::string kind = "two-sided";
  std::vector<std::pair<std::string, double>> params;  // grid coordinates, e.g. {"z", 0.5}
  std::complex<double> lhs;
  std::complex<double> rhs;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;  // effective tolerance
  bool truncated = false;
  std::optional<double> standard_error;
  std::string method;  // integral side: quadrature, monte-carlo, series, exact
  std::vector<std::pair<std::string, double>> extra;
  std::vector<std::string> notes;
  std::optional<OracleRecord> oracle;
  bool pass = false;
  double runtime = 0.0;  // seconds

  /// Fills the error fields and the verdict from lhs, rhs and tol.
  void judge() {
    abs_err = std::abs(lhs - rhs);
    rel_err = mirrorgamma::rel_err(lhs, rhs);
    pass = rel_err <= tol && !truncated && std::isfinite(abs_err) && (!oracle || oracle->pass);
  }
};

struct CheckReport {
  std::string check;
  std::string fixture;
  std::vector<double> lambda;
  std::uint64_t seed = 0;
  std::vector<PointRecord> points;
  std::vector<std::string> diagnostics;
  bool pass = false;

  void finalize() {
    pass = !points.empty() && diagnostics.empty() &&
           std::all_of(points.begin(), points.end(), [](const PointRecord& p) { return p.pass; });
  }

  /// Worst relative error over the two-sided points.
  double worst_rel_err() const {
    double w = 0.0;
    for (const auto& p : points) w = std::max(w, p.rel_err);
    return w;
  }
};

namespace detail {

inline ordered_json complex_json(std::complex<double> v) {
  ordered_json j;
  j["re"] = v.real();
  j["im"] = v.imag();
  return j;
}

inline ordered_json pairs_json(const std::vector<std::pair<std::string, double>>& kv) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

}  // namespace detail

inline ordered_json to_json(const PointRecord& p, bool timings) {
  ordered_json j;
  j["kind"] = p.kind;
  j["params"] = detail::pairs_json(p.params);
  j["lhs"] = detail::complex_json(p.lhs);
  j["rhs"] = detail::complex_json(p.rhs);
  j["abs_err"] = p.abs_err;
  j["rel_err"] = p.rel_err;
  j["tol"] = p.tol;
  j["truncated"] = p.truncated;
  if (p.standard_error) j["standard_error"] = *p.standard_error;
  j["method"] = p.method;
  if (!p.extra.empty()) j["extra"] = detail::pairs_json(p.extra);
  if (p.oracle) {
    ordered_json o;
    o["label"] = p.oracle->label;
    o["value"] = detail::complex_json(p.oracle->value);
    o["rel_err"] = p.oracle->rel_err;
    o["pass"] = p.oracle->pass;
    j["oracle"] = o;
  }
  if (!p.notes.empty()) j["notes"] = p.notes;
  j["pass"] = p.pass;
  if (timings) j["runtime_s"] = p.runtime;
  return j;
}

inline ordered_json to_json(const CheckReport& r, bool timings = false) {
  ordered_json j;
  j["check"] = r.check;
  j["fixture"] = r.fixture;
  j["lambda"] = r.lambda;
  j["pass"] = r.pass;
  ordered_json prov;
  prov["program"] = "mirrorgamma";
  prov["version"] = kVersion;
  prov["boost"] = BOOST_LIB_VERSION;
  prov["seed"] = r.seed;
  j["provenance"] = prov;
  j["diagnostics"] = r.diagnostics;
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points) pts.push_back(to_json(p, timings));
  j["points"] = pts;
  return j;
}

/// One CSV row per grid point; parameters are flattened as name=value pairs.
inline std::string to_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  out.precision(17);
  out << "check,fixture,kind,params,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,tol,truncated,pass\n";
  for (const auto& r : reports)
    for (const auto& p : r.points) {
      std::string params;
      for (const auto& [k, v] : p.params) {
        if (!params.empty()) params += ';';
        std::ostringstream s;
        s.precision(17);
        s << k << '=' << v;
        params += s.str();
      }
      out << r.check << ',' << r.fixture << ',' << p.kind << ',' << params << ',' << p.lhs.real() << ',' << p.lhs.imag()
          << ',' << p.rhs.real() << ',' << p.rhs.imag() << ',' << p.abs_err << ',' << p.rel_err << ',' << p.tol << ','
          << (p.truncated ? 1 : 0) << ',' << (p.pass ? 1 : 0) << '\n';
    }
  return out.str();
}

}  // namespace mirrorgamma
