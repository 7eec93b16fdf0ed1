#pragma once

// The toric J-function J_F = e^{tau/z} sum_d e^{tau.d} J_d(z) and its hypergeometric
// modifications, truncated at c_1.d <= N.
//
// Each J_d is homogeneous of degree -c_1.d in (classes, z), so only J_d(1) is stored: the
// H^{2k} component of J_d(z) is the H^{2k} component of J_d(1) times z^{z_weight - k}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorgamma/classes/divisor.hpp"
#include "mirrorgamma/classes/graded_class.hpp"
#include "mirrorgamma/toric/curves.hpp"

namespace mirrorgamma {

enum class JMethod {
  Exact,        // rational arithmetic, then rounded
  LogHarmonic,  // log-factorials and generalized harmonic numbers in double; no overflow at large degree
};

enum class ISide {
  TotalSpace,  // prod_{k=0}^{v.d-1} (-v - k z)
  Section,     // prod_{k=1}^{v.d} (v + k z)
};

class NotNefError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// J_d(1) = exp(log_scale) * coeff.
struct JTerm {
  CurveClass d;
  int z_weight = 0;
  double log_scale = 0.0;
  RealClass coeff;
  std::optional<ExactClass> exact;

  bool vanishes() const { return !std::isfinite(log_scale); }
  /// Exponent of z carried by basis element i.
  int z_exponent(std::size_t i) const { return z_weight - coeff.ring()->degree(i); }
};

struct JExpansion {
  RingPtr ring;
  int N = 0;
  JMethod method = JMethod::Exact;
  std::vector<JTerm> terms;  // ordered as enumerate_curve_classes
};

struct TruncationReport {
  int N = 0;
  double last_degree_contribution = 0.0;
  double estimated_tail = 0.0;
  double total_magnitude = 0.0;

  /// The last degree contributes at least tol/10 of the total.
  bool limited(double tol) const {
    return !(last_degree_contribution < 0.1 * tol * total_magnitude) || !std::isfinite(estimated_tail);
  }
};

/// Scalar series value with per-degree partial contributions (degree = c_1.d).
struct SeriesValue {
  Complex value{0.0, 0.0};
  TruncationReport truncation;
  std::vector<std::pair<int, Complex>> by_degree;
};

/// Class-valued series value exp(log_scale) * value.
struct ScaledClass {
  GradedClass value;
  double log_scale = 0.0;
  TruncationReport truncation;

  GradedClass unscaled() const { return value * Complex(std::exp(log_scale)); }
};

namespace detail {

// Generalized harmonic numbers H_m^{(p)} = sum_{k=1}^m k^{-p}, p = 1..n.
inline std::vector<double> harmonic(int m, int n) {
  std::vector<double> h(n + 1, 0.0);
  for (int k = 1; k <= m; ++k) {
    double inv = 1.0 / k, pw = 1.0;
    for (int p = 1; p <= n; ++p) {
      pw *= inv;
      h[p] += pw;
    }
  }
  return h;
}

inline RealClass real_part(const GradedClass& x) {
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = x[i].real();
  return RealClass(x.ring(), std::move(c));
}

inline RealClass to_real(const ExactClass& x) {
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = to_double(x[i]);
  return RealClass(x.ring(), std::move(c));
}

inline RealClass exp_real(const RealClass& x) {
  const int n = x.ring()->dim();
  std::vector<double> c(n + 1);
  double f = 1.0;
  for (int m = 0; m <= n; ++m) {
    if (m > 0) f /= m;
    c[m] = f;
  }
  return power_series<double>(x, c);
}

// exp(sum_p sign_p h[p] x^p / p) with sign_p = (-1)^{p+1} when alternating, else 1; scaled by `outer`.
inline RealClass harmonic_exp(const RealClass& x, const std::vector<double>& h, bool alternating, double outer) {
  const int n = x.ring()->dim();
  std::vector<double> c(n + 1, 0.0);
  for (int p = 1; p <= n; ++p) c[p] = outer * (alternating && p % 2 == 0 ? -1.0 : 1.0) * h[p] / p;
  return exp_real(power_series<double>(x, c));
}

inline void normalize(JTerm& t, const RealClass& value, double extra_log) {
  double m = 0.0;
  for (double v : value.coefficients()) m = std::max(m, std::abs(v));
  if (m == 0.0) {
    t.coeff = RealClass(value.ring());
    t.log_scale = -std::numeric_limits<double>::infinity();
    return;
  }
  t.coeff = value * (1.0 / m);
  t.log_scale = extra_log + std::log(m);
}

inline void normalize_exact(JTerm& t, const ExactClass& value) {
  Rational m = 0;
  for (const auto& v : value.coefficients()) m = std::max(m, v < 0 ? Rational(-v) : v);
  if (m == 0) {
    t.coeff = RealClass(value.ring());
    t.log_scale = -std::numeric_limits<double>::infinity();
    return;
  }
  t.coeff = to_real(value * (1 / m));
  t.log_scale = log_abs(m);
}

// prod_{k=a}^{b} (x + k) for integers a <= b (empty product = 1).
inline ExactClass linear_product(const ExactClass& x, int a, int b) {
  ExactClass out = ExactClass::unit(x.ring());
  for (int k = a; k <= b; ++k) out = out * (x + ExactClass::constant(x.ring(), Rational(k)));
  return out;
}

inline ExactClass exact_j_term(const RingPtr& ring, const CurveClass& d) {
  ExactClass out = ExactClass::unit(ring);
  for (int j = 0; j < ring->fan().num_rays(); ++j) {
    const int m = d.pairing[j];
    const ExactClass D = exact_divisor(ring, j);
    if (m > 0)
      out = out * inverse(linear_product(D, 1, m));
    else if (m < 0)
      out = out * linear_product(D, m + 1, 0);
  }
  return out;
}

inline void log_harmonic_j_term(const RingPtr& ring, JTerm& t) {
  const int n = ring->dim();
  RealClass log_part(ring);
  RealClass prefactor = RealClass::unit(ring);
  double log_scale = 0.0;
  double sign = 1.0;
  for (int j = 0; j < ring->fan().num_rays(); ++j) {
    const int m = t.d.pairing[j];
    if (m == 0) continue;
    const RealClass D = to_real(exact_divisor(ring, j));
    if (m > 0) {
      // 1/prod_{k=1}^m (D+k) = exp(-lgamma(m+1)) exp(-sum_p (-1)^{p+1} H_m^{(p)} D^p / p)
      log_scale -= std::lgamma(m + 1.0);
      const auto h = harmonic(m, n);
      std::vector<double> c(n + 1, 0.0);
      for (int p = 1; p <= n; ++p) c[p] = -(p % 2 == 0 ? -1.0 : 1.0) * h[p] / p;
      log_part += power_series<double>(D, c);
    } else {
      // prod_{k=m+1}^0 (D+k) = D (-1)^{|m|-1} (|m|-1)! exp(-sum_p H_{|m|-1}^{(p)} D^p / p)
      const int a = -m - 1;
      log_scale += std::lgamma(a + 1.0);
      if (a % 2 == 1) sign = -sign;
      prefactor = prefactor * D;
      const auto h = harmonic(a, n);
      std::vector<double> c(n + 1, 0.0);
      for (int p = 1; p <= n; ++p) c[p] = -h[p] / p;
      log_part += power_series<double>(D, c);
    }
  }
  normalize(t, prefactor * exp_real(log_part) * sign, log_scale);
}

}  // namespace detail

/// J_d for every curve class with c_1.d <= N.
inline JExpansion toric_j_coefficients(const RingPtr& ring, int N, JMethod method = JMethod::Exact) {
  if (N < 0) throw std::invalid_argument("truncation degree must be nonnegative");
  JExpansion J;
  J.ring = ring;
  J.N = N;
  J.method = method;
  for (const auto& d : enumerate_curve_classes(ring->fan(), N)) {
    JTerm t;
    t.d = d;
    t.z_weight = -d.degree;
    if (method == JMethod::Exact) {
      ExactClass value = detail::exact_j_term(ring, d);
      detail::normalize_exact(t, value);
      t.exact = std::move(value);
    } else {
      detail::log_harmonic_j_term(ring, t);
    }
    J.terms.push_back(std::move(t));
  }
  return J;
}

/// Multiplies each J_d by the bundle factor of every v_i (see ISide).  The classes v_i must be
/// nef on every curve class present.
inline JExpansion i_function(const JExpansion& J, const std::vector<DivisorClass>& v, ISide side) {
  JExpansion I = J;
  const RingPtr& ring = J.ring;
  const int n = ring->dim();
  for (const auto& vi : v)
    for (const auto& t : J.terms)
      if (vi.pairing(t.d) < 0)
        throw NotNefError("class is not nef: pairs negatively with a curve class of degree " + std::to_string(t.d.degree));

  for (auto& t : I.terms) {
    for (const auto& vi : v) {
      const int m = vi.pairing(t.d);
      t.z_weight += m;
      if (m == 0) continue;
      if (t.exact) {
        const ExactClass V = vi.to_exact(ring);
        ExactClass factor = ExactClass::unit(ring);
        if (side == ISide::Section) {
          factor = detail::linear_product(V, 1, m);
        } else {
          factor = detail::linear_product(V, 0, m - 1);
          if (m % 2 == 1) factor = -factor;
        }
        t.exact = *t.exact * factor;
      }
    }
    if (t.exact) {
      detail::normalize_exact(t, *t.exact);
      continue;
    }
    if (t.vanishes()) continue;
    RealClass acc = t.coeff;
    double log_scale = t.log_scale;
    for (const auto& vi : v) {
      const int m = vi.pairing(t.d);
      if (m == 0) continue;
      const RealClass V = detail::to_real(vi.to_exact(ring));
      if (side == ISide::Section) {
        // prod_{k=1}^m (v+k) = m! exp(sum_p (-1)^{p+1} H_m^{(p)} v^p / p)
        log_scale += std::lgamma(m + 1.0);
        acc = acc * detail::harmonic_exp(V, detail::harmonic(m, n), true, 1.0);
      } else {
        // prod_{k=0}^{m-1} (-v-k) = (-1)^m v (m-1)! exp(sum_p (-1)^{p+1} H_{m-1}^{(p)} v^p / p)
        log_scale += std::lgamma(static_cast<double>(m));
        acc = acc * V * detail::harmonic_exp(V, detail::harmonic(m - 1, n), true, 1.0) * (m % 2 == 1 ? -1.0 : 1.0);
      }
    }
    detail::normalize(t, acc, log_scale);
  }
  return I;
}

namespace detail {

inline TruncationReport make_report(int N, const std::map<int, double>& degree_norms, double total) {
  TruncationReport r;
  r.N = N;
  r.total_magnitude = total;
  if (degree_norms.empty()) return r;
  auto last = degree_norms.rbegin();
  r.last_degree_contribution = last->second;
  if (degree_norms.size() == 1) {
    r.estimated_tail = 0.0;
    return r;
  }
  const double prev = std::next(last)->second;
  const double ratio = prev > 0.0 ? last->second / prev : std::numeric_limits<double>::infinity();
  r.estimated_tail = ratio < 1.0 ? last->second * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  if (last->second == 0.0) r.estimated_tail = 0.0;
  return r;
}

inline Complex integer_power_phase(Complex unit, int e) {
  if (unit == Complex(-1.0, 0.0)) return Complex(e % 2 == 0 ? 1.0 : -1.0);
  if (unit == Complex(1.0, 0.0)) return 1.0;
  return std::pow(unit, e);
}

}  // namespace detail

/// e^{sigma/z} sum_d e^{sigma.d} I_d(z) for a complex degree-2 class sigma, kept in scaled form.
inline ScaledClass eval_J_scaled(const JExpansion& I, const GradedClass& sigma, Complex z) {
  if (z == Complex(0.0)) throw std::domain_error("eval_J: z = 0");
  const RingPtr& ring = I.ring;
  const double log_abs_z = std::log(std::abs(z));
  const Complex unit = z / std::abs(z);
  double emax = -std::numeric_limits<double>::infinity();
  std::vector<Complex> tau_d(I.terms.size());
  for (std::size_t t = 0; t < I.terms.size(); ++t) {
    const auto& term = I.terms[t];
    tau_d[t] = pair_with_curve(sigma, term.d);
    if (term.vanishes()) continue;
    for (std::size_t i = 0; i < ring->size(); ++i)
      if (term.coeff[i] != 0.0) emax = std::max(emax, term.log_scale + tau_d[t].real() + term.z_exponent(i) * log_abs_z);
  }
  ScaledClass out{GradedClass(ring), std::isfinite(emax) ? emax : 0.0, {}};
  std::map<int, GradedClass> by_degree;
  for (std::size_t t = 0; t < I.terms.size(); ++t) {
    const auto& term = I.terms[t];
    if (term.vanishes()) continue;
    GradedClass contrib(ring);
    for (std::size_t i = 0; i < ring->size(); ++i) {
      if (term.coeff[i] == 0.0) continue;
      const int e = term.z_exponent(i);
      const double mag = term.log_scale + tau_d[t].real() + e * log_abs_z - out.log_scale;
      contrib[i] = term.coeff[i] * std::exp(mag) * std::exp(Complex(0.0, tau_d[t].imag())) * detail::integer_power_phase(unit, e);
    }
    auto [it, inserted] = by_degree.try_emplace(term.d.degree, contrib);
    if (!inserted) it->second += contrib;
  }
  std::map<int, double> norms;
  for (const auto& [deg, cls] : by_degree) {
    out.value += cls;
    norms[deg] = max_abs(cls);
  }
  out.truncation = detail::make_report(I.N, norms, max_abs(out.value));
  out.value = exp(sigma * (1.0 / z)) * out.value;
  return out;
}

inline GradedClass eval_J(const JExpansion& I, const GradedClass& sigma, Complex z, TruncationReport* report = nullptr) {
  auto s = eval_J_scaled(I, sigma, z);
  if (report) *report = s.truncation;
  return s.unscaled();
}

/// e^{-tau} sum_d e^{tau.d} J_d(-1) t^{-c_1 + c_1.d}.
inline GradedClass degrade_eval(const JExpansion& J, const GradedClass& tau, double t, TruncationReport* report = nullptr) {
  if (!(t > 0.0)) throw std::domain_error("degrade_eval needs t > 0");
  const GradedClass c1 = to_complex(exact_c1(J.ring));
  return eval_J(J, tau + c1 * Complex(std::log(t)), Complex(-1.0), report);
}

/// int_F K e^{-sigma} sum_d e^{sigma.d} I_d(-1), summed with a fixed order and grouped by c_1.d.
inline SeriesValue series_pairing(const JExpansion& I, const GradedClass& sigma, const GradedClass& K) {
  const RingPtr& ring = I.ring;
  const GradedClass M = K * exp(-sigma);
  std::vector<Complex> f(ring->size());
  for (std::size_t i = 0; i < ring->size(); ++i) {
    GradedClass e(ring);
    e[i] = 1.0;
    f[i] = (M * e).integrate();
  }
  std::map<int, Complex> groups;
  for (const auto& term : I.terms) {
    if (term.vanishes()) continue;
    Complex phase = 0.0;
    for (std::size_t i = 0; i < ring->size(); ++i)
      if (term.coeff[i] != 0.0) phase += f[i] * term.coeff[i] * (term.z_exponent(i) % 2 == 0 ? 1.0 : -1.0);
    if (phase == Complex(0.0)) {
      groups.try_emplace(term.d.degree, Complex(0.0));
      continue;
    }
    groups[term.d.degree] += std::exp(term.log_scale + pair_with_curve(sigma, term.d)) * phase;
  }
  SeriesValue out;
  std::map<int, double> norms;
  for (const auto& [deg, v] : groups) {
    out.value += v;
    out.by_degree.emplace_back(deg, v);
    norms[deg] = std::abs(v);
  }
  // Degrees that appear with zero pairing (e.g. odd degrees killed by a factor) carry no
  // information about decay; the report uses the nonzero ones.
  std::erase_if(norms, [](const auto& kv) { return kv.second == 0.0; });
  out.truncation = detail::make_report(I.N, norms, std::abs(out.value));
  return out;
}

}  // namespace mirrorgamma
