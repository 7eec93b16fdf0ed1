#pragma once

// Named end-to-end checks: each pairs an integral-side computation with its series-side value
// over a parameter grid and produces a CheckReport.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <nlohmann/json.hpp>

#include "mirrorgamma/classes/characteristic.hpp"
#include "mirrorgamma/classes/divisor.hpp"
#include "mirrorgamma/gw/j_function.hpp"
#include "mirrorgamma/gw/rhs.hpp"
#include "mirrorgamma/harness/report.hpp"
#include "mirrorgamma/mirror/integrals.hpp"
#include "mirrorgamma/mirror/minimize.hpp"
#include "mirrorgamma/toric/cohomology.hpp"
#include "mirrorgamma/toric/fan.hpp"
#include "mirrorgamma/toric/polytope.hpp"

namespace mirrorgamma {

enum class CheckKind { MsGamma, Local, Anticanonical, Laplace, Generalized, Dh, GammaI };

inline const std::vector<std::pair<CheckKind, const char*>>& check_names() {
  static const std::vector<std::pair<CheckKind, const char*>> names = {
      {CheckKind::MsGamma, "ms-gamma"},       {CheckKind::Local, "local"},
      {CheckKind::Anticanonical, "anticanonical"}, {CheckKind::Laplace, "laplace"},
      {CheckKind::Generalized, "generalized"}, {CheckKind::Dh, "dh"},
      {CheckKind::GammaI, "gamma-i"}};
  return names;
}

inline const char* to_string(CheckKind k) {
  for (const auto& [kind, name] : check_names())
    if (kind == k) return name;
  return "?";
}

inline std::optional<CheckKind> parse_check_kind(const std::string& s) {
  for (const auto& [kind, name] : check_names())
    if (s == name) return kind;
  return std::nullopt;
}

/// Malformed check configuration (bad grid, tolerance, or field).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CheckSpec {
  CheckKind kind = CheckKind::MsGamma;
  std::filesystem::path fan;
  std::vector<Rational> lambda;  // empty: all zero
  std::vector<double> z{1.0};
  std::vector<double> s;  // levels; for dh the exponents m of the levels e^m
  std::vector<double> t;  // gamma-i
  int degree = 20;        // truncation N; gamma-i uses 0 for automatic
  double tol = 1e-6;      // for gamma-i the final-angle threshold
  double asymptotic_tol = 0.05;
  std::optional<IntegralMethod> method;
  std::uint64_t seed = 20240601;
  std::vector<std::vector<int>> partition;
  ISide side = ISide::Section;
  bool extend_truncation = true;  // double N while the series tail exceeds tol

  void validate() const {
    if (!(tol > 0.0)) throw SpecError("tolerance must be positive");
    if (degree < 0) throw SpecError("degree must be nonnegative");
    auto need = [](const std::vector<double>& g, const char* name) {
      if (g.empty()) throw SpecError(std::string("the ") + name + " grid must be nonempty");
    };
    switch (kind) {
      case CheckKind::MsGamma: need(z, "z"); break;
      case CheckKind::Local:
      case CheckKind::Anticanonical:
      case CheckKind::Laplace: need(s, "s"); break;
      case CheckKind::Generalized:
        need(z, "z");
        if (!partition.empty()) need(s, "s");
        break;
      case CheckKind::Dh: break;
      case CheckKind::GammaI: need(t, "t"); break;
    }
  }
};

/// Built-in defaults; shipped fixture configs override them.
inline CheckSpec default_spec(CheckKind kind) {
  CheckSpec spec;
  spec.kind = kind;
  switch (kind) {
    case CheckKind::MsGamma: spec.z = {0.5, 1.0, 2.0}; break;
    case CheckKind::Local: spec.s = {10.0, 20.0}; spec.tol = 1e-4; break;
    case CheckKind::Anticanonical: spec.s = {10.0, 30.0}; spec.tol = 1e-3; break;
    case CheckKind::Laplace: spec.s = {-20.0}; spec.tol = 1e-5; break;
    case CheckKind::Generalized: spec.s = {20.0}; spec.tol = 1e-3; break;
    case CheckKind::Dh: spec.lambda = {}; spec.s = {10.0, 20.0, 40.0}; break;
    case CheckKind::GammaI: spec.t = {10.0, 30.0, 100.0}; spec.degree = 0; spec.tol = 0.05; break;
  }
  return spec;
}

/// "p/q", an integer, a decimal (taken exactly as a double), or "ln(x)".
inline Rational parse_lambda_entry(const std::string& token) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw SpecError("cannot parse lambda entry '" + token + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw SpecError("cannot parse lambda entry '" + token + "'");
    return v;
  };
  if (token.rfind("ln(", 0) == 0 && token.back() == ')') {
    const double x = number(token.substr(3, token.size() - 4));
    if (!(x > 0.0)) throw SpecError("ln needs a positive argument in '" + token + "'");
    return Rational(std::log(x));
  }
  if (token.find_first_of(".eE") == std::string::npos && !token.empty() && token.find("inf") == std::string::npos &&
      token.find("nan") == std::string::npos) {
    try {
      return Rational(token);
    } catch (const std::exception&) {
      throw SpecError("cannot parse lambda entry '" + token + "'");
    }
  }
  return Rational(number(token));
}

inline std::vector<std::vector<int>> parse_partition(const std::string& text) {
  // "0,1;2,3" lists parts separated by semicolons.
  std::vector<std::vector<int>> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    std::vector<int> part;
    std::size_t p = start;
    while (p < end) {
      const std::size_t q = std::min(text.find(',', p), end);
      const std::string tok = text.substr(p, q - p);
      try {
        std::size_t used = 0;
        part.push_back(std::stoi(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw SpecError("cannot parse partition entry '" + tok + "'");
      }
      p = q + 1;
    }
    if (!part.empty()) parts.push_back(std::move(part));
    start = end + 1;
  }
  return parts;
}

namespace detail {

inline std::vector<double> number_list(const nlohmann::json& j, const char* key) {
  std::vector<double> out;
  if (!j.is_array()) throw SpecError(std::string(key) + " must be an array");
  for (const auto& x : j) {
    if (!x.is_number()) throw SpecError(std::string(key) + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

/// Applies the fields present in a JSON object on top of `spec`.  Relative fan paths resolve
/// against `base`.
inline CheckSpec apply_json(CheckSpec spec, const nlohmann::json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw SpecError("check entry must be an object");
  if (j.contains("fan")) spec.fan = base / j["fan"].get<std::string>();
  if (j.contains("lambda")) {
    spec.lambda.clear();
    for (const auto& x : j["lambda"])
      spec.lambda.push_back(x.is_string() ? parse_lambda_entry(x.get<std::string>()) : Rational(x.get<double>()));
  }
  if (j.contains("z")) spec.z = detail::number_list(j["z"], "z");
  if (j.contains("s")) spec.s = detail::number_list(j["s"], "s");
  if (j.contains("t")) spec.t = detail::number_list(j["t"], "t");
  if (j.contains("degree")) spec.degree = j["degree"].get<int>();
  if (j.contains("tol")) spec.tol = j["tol"].get<double>();
  if (j.contains("asymptotic_tol")) spec.asymptotic_tol = j["asymptotic_tol"].get<double>();
  if (j.contains("extend_truncation")) spec.extend_truncation = j["extend_truncation"].get<bool>();
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("method")) {
    const auto m = j["method"].get<std::string>();
    if (m == "quad") spec.method = IntegralMethod::Quadrature;
    else if (m == "mc") spec.method = IntegralMethod::MonteCarlo;
    else throw SpecError("method must be quad or mc");
  }
  if (j.contains("partition")) spec.partition = j["partition"].get<std::vector<std::vector<int>>>();
  if (j.contains("side")) {
    const auto side = j["side"].get<std::string>();
    if (side == "section") spec.side = ISide::Section;
    else if (side == "total-space") spec.side = ISide::TotalSpace;
    else throw SpecError("side must be section or total-space");
  }
  return spec;
}

/// Checks listed in a fixture config {"fan": ..., "checks": [{"check": name, ...}, ...]}.
inline std::vector<CheckSpec> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  std::vector<CheckSpec> out;
  try {
    for (const auto& entry : j.at("checks")) {
      const auto kind = parse_check_kind(entry.at("check").get<std::string>());
      if (!kind) throw SpecError("unknown check '" + entry.at("check").get<std::string>() + "'");
      CheckSpec spec = default_spec(*kind);
      spec.fan = base / j.at("fan").get<std::string>();
      out.push_back(apply_json(spec, entry, base));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
  return out;
}

/// Config file next to a fan file: p1.fan -> p1.checks.json.
inline std::filesystem::path config_for(const std::filesystem::path& fan) {
  auto p = fan;
  p.replace_extension(".checks.json");
  return p;
}

/// Every *.checks.json in a directory, in file name order.
inline std::vector<CheckSpec> load_fixture_configs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 12 && name.ends_with(".checks.json")) files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot read directory " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<CheckSpec> out;
  for (const auto& f : files)
    for (auto& s : load_config(f)) out.push_back(std::move(s));
  return out;
}

namespace oracle {

/// Closed forms for the one-dimensional mirror a x + b/x, which depend only on r = sqrt(ab).
inline double oscillatory(double r, double z) { return 2.0 * boost::math::cyl_bessel_k(0, 2.0 * r / z); }
inline double volume(double r, double s) { return s > 2.0 * r ? 2.0 * std::acosh(s / (2.0 * r)) : 0.0; }
inline double fiber(double r, double s) { return 2.0 / std::sqrt(s * s - 4.0 * r * r); }

/// int dt / (2r cosh t - s) for s < 2r.
inline double hilbert(double r, double s) {
  const double a = -s, b = 2.0 * r;
  if (a > b) {
    const double q = std::sqrt(a * a - b * b);
    return std::log((a + q) / (a - q)) / q;
  }
  if (a == b) return 2.0 / a;
  return 2.0 / std::sqrt(b * b - a * a) * std::acos(a / b);
}

}  // namespace oracle

namespace detail {

/// Everything a check derives from the fan and lambda.
class Problem {
 public:
  explicit Problem(const CheckSpec& spec)
      : fan_(load_fan(spec.fan)),
        ring_(CohRing::build(fan_)),
        lambda_exact_(spec.lambda.empty() ? std::vector<Rational>(fan_.num_rays(), Rational(0)) : spec.lambda),
        lambda_(to_doubles(lambda_exact_)),
        W_(mirror_for(fan_, lambda_)),
        tau_(kahler_class(ring_, lambda_)),
        gamma_F_(gamma_class(ring_)) {}

  const FanData& fan() const { return fan_; }
  const RingPtr& ring() const { return ring_; }
  const std::vector<Rational>& lambda_exact() const { return lambda_exact_; }
  const std::vector<double>& lambda() const { return lambda_; }
  const LaurentPoly& W() const { return W_; }
  const GradedClass& tau() const { return tau_; }
  const GradedClass& gamma_F() const { return gamma_F_; }

  double T() const {
    if (!T_) T_ = minimize_log(W_).T;
    return *T_;
  }

  /// r = sqrt(ab) when W = a x + b/x.
  std::optional<double> line_radius() const {
    if (W_.dim() != 1 || W_.terms().size() != 2) return std::nullopt;
    const auto& a = W_.terms()[0];
    const auto& b = W_.terms()[1];
    if (a.exponent[0] * b.exponent[0] != -1) return std::nullopt;
    return std::sqrt(a.coeff * b.coeff);
  }

 private:
  static std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    for (const auto& x : v) out.push_back(to_double(x));
    return out;
  }
  static LaurentPoly mirror_for(const FanData& fan, const std::vector<double>& lambda) {
    if (static_cast<int>(lambda.size()) != fan.num_rays())
      throw SpecError("lambda needs " + std::to_string(fan.num_rays()) + " entries");
    return build_mirror(fan, lambda);
  }

  FanData fan_;
  RingPtr ring_;
  std::vector<Rational> lambda_exact_;
  std::vector<double> lambda_;
  LaurentPoly W_;
  GradedClass tau_;
  GradedClass gamma_F_;
  mutable std::optional<double> T_;
};

inline IntegralOptions integral_options(const CheckSpec& spec) {
  IntegralOptions opt;
  opt.method = spec.method;
  opt.seed = spec.seed;
  return opt;
}

/// The estimated series tail exceeds the tolerance.
inline bool series_truncated(const SeriesValue& v, double tol) {
  const double tail = v.truncation.estimated_tail;
  return !std::isfinite(tail) || tail > tol * std::max(std::abs(v.value), 1e-300);
}

inline constexpr int kMaxDegree = 256;

/// Sums a series at the configured truncation; if its tail is above tol and the spec allows it,
/// doubles N until it is not.  The final N is recorded on the point.
inline SeriesValue converged_series(const CheckSpec& spec, const RingPtr& ring, const JExpansion& J,
                                    const std::function<SeriesValue(const JExpansion&)>& f, PointRecord& p) {
  SeriesValue v = f(J);
  if (!spec.extend_truncation || !series_truncated(v, spec.tol)) return v;
  int N = J.N;
  while (series_truncated(v, spec.tol) && N < kMaxDegree) {
    N = std::min(kMaxDegree, std::max(2 * N, 8));
    v = f(toric_j_coefficients(ring, N));
  }
  p.notes.push_back("truncation extended from N = " + std::to_string(J.N) + " to N = " + std::to_string(N));
  return v;
}

inline void add_series_info(PointRecord& p, const SeriesValue& v) {
  p.extra.emplace_back("N", v.truncation.N);
  p.extra.emplace_back("estimated_tail", v.truncation.estimated_tail);
}

inline void add_integral_info(PointRecord& p, const IntegralResult& r, double tol) {
  p.method = to_string(r.method);
  p.tol = tol;
  if (r.method == IntegralMethod::MonteCarlo) {
    p.standard_error = r.error_estimate;
    p.tol = std::max(tol, 4.0 * r.error_estimate);
  } else {
    p.extra.emplace_back("integral_error", r.error_estimate);
  }
}

inline void set_oracle(PointRecord& p, std::string label, std::complex<double> value, std::complex<double> against,
                       double tol) {
  OracleRecord o;
  o.label = std::move(label);
  o.value = value;
  o.rel_err = rel_err(against, value);
  o.pass = o.rel_err <= tol;
  p.oracle = o;
}

/// Evaluates fn on every grid point concurrently; records are kept in grid order.  A point that
/// throws fails with the message as a diagnostic.
inline void run_points(CheckReport& report, std::size_t count, const std::function<PointRecord(std::size_t)>& fn) {
  std::vector<PointRecord> points(count);
  std::vector<std::string> errors(count);
  parallel_for(count, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      points[i] = fn(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      points[i].pass = false;
      points[i].notes.push_back(std::string("error: ") + e.what());
    }
    points[i].runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  for (std::size_t i = 0; i < count; ++i) {
    report.points.push_back(std::move(points[i]));
    if (!errors[i].empty()) report.diagnostics.push_back(errors[i]);
  }
}

inline CheckReport start_report(const CheckSpec& spec, const Problem& P) {
  CheckReport r;
  r.check = to_string(spec.kind);
  r.fixture = spec.fan.stem().string();
  r.lambda = P.lambda();
  r.seed = spec.seed;
  return r;
}

inline std::string format_level(const char* what, double s, double T) {
  std::ostringstream o;
  o.precision(10);
  o << what << " (s = " << s << ", T = " << T << ")";
  return o.str();
}

}  // namespace detail

/// oscillatory_integral(W_lambda, z) against the series side at tau = -sum lambda_j D_j.
inline CheckReport check_ms_gamma(const CheckSpec& spec) {
  spec.validate();
  const detail::Problem P(spec);
  auto report = detail::start_report(spec, P);
  const auto J = toric_j_coefficients(P.ring(), spec.degree);
  const auto r = P.line_radius();
  detail::run_points(report, spec.z.size(), [&](std::size_t i) {
    const double z = spec.z[i];
    PointRecord p;
    p.params = {{"z", z}};
    const auto lhs = oscillatory_integral(P.W(), z, detail::integral_options(spec));
    const auto rhs = detail::converged_series(
        spec, P.ring(), J, [&](const JExpansion& Jn) { return rhs_ms_gamma(Jn, P.gamma_F(), P.tau(), z); }, p);
    p.lhs = lhs.value;
    p.rhs = rhs.value;
    detail::add_integral_info(p, lhs, spec.tol);
    detail::add_series_info(p, rhs);
    p.truncated = detail::series_truncated(rhs, spec.tol);
    if (r) detail::set_oracle(p, "2 K_0(2 sqrt(ab)/z)", oracle::oscillatory(*r, z), p.lhs, spec.tol);
    p.judge();
    return p;
  });
  report.finalize();
  return report;
}

/// 2 pi i region_volume([W], s) against the canonical-bundle series; every s must exceed 2T.
inline CheckReport check_local_charge(const CheckSpec& spec) {
  spec.validate();
  const detail::Problem P(spec);
  auto report = detail::start_report(spec, P);
  const double T = P.T();
  for (double s : spec.s) {
    if (s <= T) report.diagnostics.push_back(detail::format_level("cycle empty: s ≤ T", s, T));
    else if (s <= 2.0 * T) report.diagnostics.push_back(detail::format_level("s is inside the margin: need s > 2T", s, T));
  }
  if (!report.diagnostics.empty()) {
    report.finalize();
    return report;
  }
  const auto J = toric_j_coefficients(P.ring(), spec.degree);
  const auto r = P.line_radius();
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  detail::run_points(report, spec.s.size(), [&](std::size_t i) {
    const double s = spec.s[i];
    PointRecord p;
    p.params = {{"s", s}};
    const auto vol = region_volume({P.W()}, {s}, std::nullopt, detail::integral_options(spec));
    const auto rhs = detail::converged_series(
        spec, P.ring(), J, [&](const JExpansion& Jn) { return rhs_local_charge(Jn, P.gamma_F(), P.tau(), s); }, p);
    p.lhs = two_pi_i * vol.value;
    p.rhs = rhs.value;
    detail::add_integral_info(p, vol, spec.tol);
    detail::add_series_info(p, rhs);
    p.truncated = detail::series_truncated(rhs, spec.tol);
    // The series value is 2 pi i times a real volume: its real part must vanish.
    const double imag_ratio = std::abs((rhs.value / two_pi_i).imag()) / std::max(std::abs(rhs.value), 1e-300);
    p.extra.emplace_back("imag_ratio", imag_ratio);
    if (r) detail::set_oracle(p, "2 pi i 2 arccosh(s/(2 sqrt(ab)))", two_pi_i * oracle::volume(*r, s), p.lhs, spec.tol);
    p.judge();
    if (!(imag_ratio < 1e-8)) {
      p.pass = false;
      p.notes.push_back("series side is not 2 pi i times a real number");
    }
    return p;
  });
  report.finalize();
  return report;
}

/// s fiber_integral([W], s) against the section series, plus the series-side derivative identity
/// (2 pi i / s) rhs_anticanonical = d/ds rhs_local_charge.
inline CheckReport check_anticanonical(const CheckSpec& spec, double derivative_tol = 1e-6) {
  spec.validate();
  const detail::Problem P(spec);
  auto report = detail::start_report(spec, P);
  const double T = P.T();
  for (double s : spec.s)
    if (s <= T) report.diagnostics.push_back(detail::format_level("cycle empty: s ≤ T", s, T));
  if (!report.diagnostics.empty()) {
    report.finalize();
    return report;
  }
  const auto J = toric_j_coefficients(P.ring(), spec.degree);
  const auto r = P.line_radius();
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  const std::size_t n = spec.s.size();
  detail::run_points(report, 2 * n, [&](std::size_t i) {
    const double s = spec.s[i % n];
    PointRecord p;
    p.params = {{"s", s}};
    if (i < n) {
      const auto fib = fiber_integral({P.W()}, {s}, std::nullopt, detail::integral_options(spec));
      const auto rhs = detail::converged_series(
          spec, P.ring(), J, [&](const JExpansion& Jn) { return rhs_anticanonical(Jn, P.gamma_F(), P.tau(), s); }, p);
      p.lhs = s * fib.value;
      p.rhs = rhs.value;
      detail::add_integral_info(p, fib, spec.tol);
      if (p.standard_error) *p.standard_error *= s;
      detail::add_series_info(p, rhs);
      p.truncated = detail::series_truncated(rhs, spec.tol);
      if (r) detail::set_oracle(p, "2s / sqrt(s^2 - 4ab)", s * oracle::fiber(*r, s), p.lhs, spec.tol);
      p.judge();
      return p;
    }
    // Richardson-extrapolated central difference of the local-charge series.
    p.kind = "derivative-identity";
    p.method = "series";
    auto local = [&](double x) { return rhs_local_charge(J, P.gamma_F(), P.tau(), x).value; };
    auto D = [&](double h) { return (local(s + h) - local(s - h)) / (2.0 * h); };
    const double h = 1e-2 * s;
    const Complex d1 = D(h), d2 = D(0.5 * h), d3 = D(0.25 * h);
    const Complex r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
    const auto anti = rhs_anticanonical(J, P.gamma_F(), P.tau(), s);
    p.lhs = two_pi_i / s * anti.value;
    p.rhs = (16.0 * r2 - r1) / 15.0;
    p.tol = derivative_tol;
    p.truncated = detail::series_truncated(anti, derivative_tol);
    p.extra.emplace_back("N", anti.truncation.N);
    p.judge();
    return p;
  });
  report.finalize();
  return report;
}

/// hilbert_integral(W, s) against the Laplace-transformed series for s < 0.  The series converges
/// for |s| > T; closer to the origin its analytic continuation is used.
inline CheckReport check_laplace_crosscheck(const CheckSpec& spec) {
  spec.validate();
  const detail::Problem P(spec);
  auto report = detail::start_report(spec, P);
  for (double s : spec.s)
    if (!(s < 0.0)) report.diagnostics.push_back("laplace check needs s < 0 (s = " + std::to_string(s) + ")");
  if (!report.diagnostics.empty()) {
    report.finalize();
    return report;
  }
  const double T = P.T();
  const auto J = toric_j_coefficients(P.ring(), spec.degree);
  const auto r = P.line_radius();
  detail::run_points(report, spec.s.size(), [&](std::size_t i) {
    const double s = spec.s[i];
    PointRecord p;
    p.params = {{"s", s}};
    const auto lhs = hilbert_integral(P.W(), s, detail::integral_options(spec));
    p.lhs = lhs.value;
    detail::add_integral_info(p, lhs, spec.tol);
    if (-s > 2.0 * T) {
      const auto rhs = detail::converged_series(
          spec, P.ring(), J, [&](const JExpansion& Jn) { return rhs_hcI_series(Jn, P.gamma_F(), P.tau(), s); }, p);
      p.rhs = rhs.value;
      detail::add_series_info(p, rhs);
      p.truncated = detail::series_truncated(rhs, spec.tol);
    } else {
      const auto rhs = rhs_hcI_continued(P.ring(), P.tau(), s);
      p.rhs = rhs.value;
      p.notes.push_back("series continued from its convergence region");
      p.extra.emplace_back("anchor", -rhs.report.anchor);
      p.extra.emplace_back("taylor_order", rhs.report.taylor_order);
      p.truncated = !(rhs.report.anchor_truncation < 0.1 * spec.tol);
    }
    if (r) detail::set_oracle(p, "int dt / (2 sqrt(ab) cosh t - s)", oracle::hilbert(*r, s), p.lhs, spec.tol);
    p.judge();
    return p;
  });
  report.finalize();
  return report;
}

/// Nef-partition identities.  Section side: (prod s_i) fiber_integral with weight e^{-W0/z};
/// total-space side: (2 pi i)^c region_volume with the same weight.  Every part uses the same
/// level s from the grid.  An empty partition is the ms-gamma check.
inline CheckReport check_generalized(const CheckSpec& spec) {
  if (spec.partition.empty()) {
    CheckSpec plain = spec;
    plain.kind = CheckKind::MsGamma;
    auto r = check_ms_gamma(plain);
    r.check = to_string(CheckKind::Generalized);
    return r;
  }
  spec.validate();
  const detail::Problem P(spec);
  auto report = detail::start_report(spec, P);
  const int c = static_cast<int>(spec.partition.size());
  const auto partition = NefPartition::from_rays(P.fan().num_rays(), spec.partition);
  const auto mirror = build_mirror_partition(P.fan(), P.lambda(), spec.partition);
  const auto J = toric_j_coefficients(P.ring(), spec.degree);
  detail::validate_partition(J, partition);
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  const std::size_t ns = spec.s.size();
  detail::run_points(report, spec.z.size() * ns, [&](std::size_t i) {
    const double z = spec.z[i / ns], s = spec.s[i % ns];
    const std::vector<double> levels(c, s);
    PointRecord p;
    p.kind = spec.side == ISide::Section ? "section" : "total-space";
    p.params = {{"z", z}, {"s", s}};
    std::optional<Weight> weight;
    if (!mirror.W0.empty()) weight = Weight{mirror.W0, z};
    const auto opt = detail::integral_options(spec);
    IntegralResult lhs;
    Complex factor = 1.0;
    if (spec.side == ISide::Section) {
      lhs = fiber_integral(mirror.Ws, levels, weight, opt);
      factor = std::pow(s, c);
    } else {
      lhs = region_volume(mirror.Ws, levels, weight, opt);
      factor = std::pow(two_pi_i, c);
    }
    const auto rhs = detail::converged_series(
        spec, P.ring(), J,
        [&](const JExpansion& Jn) { return rhs_generalized(Jn, P.gamma_F(), P.tau(), partition, levels, z, spec.side); }, p);
    p.lhs = factor * lhs.value;
    p.rhs = rhs.value;
    detail::add_integral_info(p, lhs, spec.tol);
    if (p.standard_error) *p.standard_error *= std::abs(factor);
    detail::add_series_info(p, rhs);
    p.truncated = detail::series_truncated(rhs, spec.tol);
    p.judge();
    return p;
  });
  report.finalize();
  return report;
}

/// Exact Duistermaat-Heckman pairing against the polytope volume, then the ratio
/// region_volume(W, e^m) / vol(P_{lambda + m}) along the m grid: the gap must not grow and must
/// end below asymptotic_tol.
inline CheckReport check_dh(const CheckSpec& spec) {
  spec.validate();
  const detail::Problem P(spec);
  auto report = detail::start_report(spec, P);
  {
    PointRecord p;
    p.kind = "exact";
    p.method = "exact";
    const Rational dh = dh_pairing(*P.ring(), P.lambda_exact());
    const Rational vol = moment_polytope(P.fan(), P.lambda_exact()).volume;
    p.lhs = to_double(dh);
    p.rhs = to_double(vol);
    p.notes.push_back("dh_pairing = " + dh.str() + ", volume = " + vol.str());
    p.abs_err = std::abs(p.lhs - p.rhs);
    p.rel_err = rel_err(p.lhs, p.rhs);
    p.pass = dh == vol;
    report.points.push_back(p);
  }
  detail::run_points(report, spec.s.size(), [&](std::size_t i) {
    const double m = spec.s[i];
    PointRecord p;
    p.kind = "asymptotic";
    p.params = {{"m", m}};
    std::vector<Rational> shifted = P.lambda_exact();
    for (auto& x : shifted) x += Rational(m);
    const auto vol = region_volume({P.W()}, {std::exp(m)}, std::nullopt, detail::integral_options(spec));
    p.lhs = vol.value;
    p.rhs = to_double(moment_polytope(P.fan(), shifted).volume);
    detail::add_integral_info(p, vol, spec.asymptotic_tol);
    p.abs_err = std::abs(p.lhs - p.rhs);
    p.rel_err = rel_err(p.lhs, p.rhs);
    return p;
  });
  // The gap must shrink along the grid and end below the threshold.
  double previous = 1.0;
  for (std::size_t k = 1; k < report.points.size(); ++k) {
    auto& p = report.points[k];
    const bool last = k + 1 == report.points.size();
    p.tol = last ? std::min(previous, spec.asymptotic_tol) : previous;
    // A gap already at quadrature accuracy counts as converged.
    const bool shrinks = p.rel_err < previous || p.rel_err < 1e-9;
    p.pass = p.notes.empty() && shrinks && (!last || p.rel_err < spec.asymptotic_tol);
    previous = std::max(p.rel_err, 1e-9);
  }
  report.finalize();
  return report;
}

/// Angle between the lines of J(c_1 log t, 1) and Gamma_F along an increasing t grid: strictly
/// decreasing, final angle below tol.  Error fields carry the angle.
inline CheckReport check_gamma_I(const CheckSpec& spec) {
  spec.validate();
  if (!std::is_sorted(spec.t.begin(), spec.t.end()) ||
      std::adjacent_find(spec.t.begin(), spec.t.end()) != spec.t.end())
    throw SpecError("the t grid must be strictly increasing");
  const detail::Problem P(spec);
  auto report = detail::start_report(spec, P);
  detail::run_points(report, spec.t.size(), [&](std::size_t i) {
    const double t = spec.t[i];
    PointRecord p;
    p.kind = "angle";
    p.method = "series";
    p.params = {{"t", t}};
    const auto g = gamma_I_direction(P.ring(), t, spec.degree);
    p.lhs = g.angle;
    p.rhs = 0.0;
    p.abs_err = g.angle;
    p.rel_err = g.angle;
    p.extra = {{"log10_angle", g.log10_angle}, {"N", g.N}, {"digits", g.digits}};
    return p;
  });
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < report.points.size(); ++k) {
    auto& p = report.points[k];
    if (!p.notes.empty()) continue;
    const double log10_angle = p.extra[0].second;
    const bool last = k + 1 == report.points.size();
    p.tol = last ? spec.tol : 0.0;
    p.pass = log10_angle < previous && (!last || p.lhs.real() < spec.tol);
    if (!(log10_angle < previous)) p.notes.push_back("angle did not decrease");
    previous = log10_angle;
  }
  if (report.points.size() == 1) report.points[0].notes.push_back("single grid point: monotonicity is vacuous");
  report.finalize();
  return report;
}

inline CheckReport run_check(const CheckSpec& spec) {
  switch (spec.kind) {
    case CheckKind::MsGamma: return check_ms_gamma(spec);
    case CheckKind::Local: return check_local_charge(spec);
    case CheckKind::Anticanonical: return check_anticanonical(spec);
    case CheckKind::Laplace: return check_laplace_crosscheck(spec);
    case CheckKind::Generalized: return check_generalized(spec);
    case CheckKind::Dh: return check_dh(spec);
    case CheckKind::GammaI: return check_gamma_I(spec);
  }
  throw SpecError("unknown check");
}

/// Runs independent checks concurrently; reports come back in input order.
inline std::vector<CheckReport> run_checks(const std::vector<CheckSpec>& specs) {
  std::vector<CheckReport> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    try {
      out[i] = run_check(specs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace mirrorgamma
