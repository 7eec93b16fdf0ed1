#pragma once

// Series sides of the Gamma identities.  Every quantity is reduced to
//   int_F K e^{-sigma} sum_d e^{sigma.d} I_d(-1)
// for a complex degree-2 class sigma (tau shifted by logarithms of z or s) and a fixed class K.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mirrorgamma/classes/characteristic.hpp"
#include "mirrorgamma/classes/divisor.hpp"
#include "mirrorgamma/gw/j_function.hpp"
#include "mirrorgamma/toric/curves.hpp"

namespace mirrorgamma {

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline GradedClass c1_class(const RingPtr& ring) { return to_complex(exact_c1(ring)); }

inline void require_degree_two(const GradedClass& tau, const char* what) {
  if (!tau.is_homogeneous(1)) throw std::invalid_argument(std::string(what) + " must be a degree-2 class");
}

}  // namespace detail

/// int_F (z^{c_1} z^{deg/2} J(tau, -z)) Gamma_F.
inline SeriesValue rhs_ms_gamma(const JExpansion& J, const GradedClass& gamma_F, const GradedClass& tau, double z) {
  if (!(z > 0.0)) throw std::domain_error("rhs_ms_gamma needs z > 0");
  detail::require_degree_two(tau, "tau");
  const GradedClass sigma = tau - detail::c1_class(J.ring) * Complex(std::log(z));
  return series_pairing(J, sigma, gamma_F);
}

/// F-level value of the canonical-bundle pairing with O_F:
/// int_F I_{K_F}(tau - c_1 log(-s), -1) Gamma(1 - c_1) (1 - e^{2 pi i c_1})/(-c_1) Gamma_F.
inline SeriesValue rhs_local_charge(const JExpansion& J, const GradedClass& gamma_F, const GradedClass& tau, double s,
                                    Branch b = branch::total_space) {
  if (!(s > 0.0)) throw std::domain_error("rhs_local_charge needs s > 0");
  detail::require_degree_two(tau, "tau");
  const RingPtr& ring = J.ring;
  const int c = ring->fan().num_rays();
  const auto I = i_function(J, {DivisorClass::anticanonical(c)}, ISide::TotalSpace);
  const GradedClass c1 = detail::c1_class(ring);
  const GradedClass sigma = tau - c1 * log_on_branch(-s, b);
  const GradedClass v[] = {c1};
  return series_pairing(I, sigma, jump_factor(ring, v) * gamma_F);
}

/// int_F c_1 I~_Y(tau - c_1 log s, -1) Gamma_F / Gamma(1 + c_1), real logarithm.
inline SeriesValue rhs_anticanonical(const JExpansion& J, const GradedClass& gamma_F, const GradedClass& tau, double s) {
  if (!(s > 0.0)) throw std::domain_error("rhs_anticanonical needs s > 0");
  detail::require_degree_two(tau, "tau");
  const RingPtr& ring = J.ring;
  const auto I = i_function(J, {DivisorClass::anticanonical(ring->fan().num_rays())}, ISide::Section);
  const GradedClass c1 = detail::c1_class(ring);
  const GradedClass v[] = {c1};
  return series_pairing(I, tau - c1 * Complex(std::log(s)), c1 * gamma_of_quotient(gamma_F, v));
}

/// (1/(-s)) int_F I~_Y(tau - c_1 log s, -1) e^{-pi i c_1} Gamma(1 - c_1) Gamma_F for s < 0.
inline SeriesValue rhs_hcI_series(const JExpansion& J, const GradedClass& gamma_F, const GradedClass& tau, double s,
                                  Branch b = branch::laplace) {
  if (!(s < 0.0)) throw std::domain_error("rhs_hcI_series needs s < 0");
  detail::require_degree_two(tau, "tau");
  const RingPtr& ring = J.ring;
  const auto I = i_function(J, {DivisorClass::anticanonical(ring->fan().num_rays())}, ISide::Section);
  const GradedClass c1 = detail::c1_class(ring);
  auto out = series_pairing(I, tau - c1 * log_on_branch(s, b), laplace_factor(c1) * gamma_F);
  const double scale = 1.0 / (-s);
  out.value *= scale;
  for (auto& [deg, v] : out.by_degree) v *= scale;
  out.truncation.last_degree_contribution *= scale;
  out.truncation.estimated_tail *= scale;
  out.truncation.total_magnitude *= scale;
  return out;
}

/// Partition c_1 = v_0 + v_1 + ... + v_c into nef classes.
struct NefPartition {
  std::vector<DivisorClass> v;
  DivisorClass v0;

  /// v_i = sum of the rays in parts[i]; v_0 collects the remaining rays.
  static NefPartition from_rays(int num_rays, const std::vector<std::vector<int>>& parts) {
    NefPartition p;
    std::vector<int> used(num_rays, 0);
    for (const auto& part : parts) {
      for (int j : part) {
        if (j < 0 || j >= num_rays) throw std::invalid_argument("partition refers to a missing ray");
        if (used[j]++) throw std::invalid_argument("partition parts overlap");
      }
      p.v.push_back(DivisorClass::sum_of(num_rays, part));
    }
    std::vector<int> rest;
    for (int j = 0; j < num_rays; ++j)
      if (!used[j]) rest.push_back(j);
    p.v0 = DivisorClass::sum_of(num_rays, rest);
    return p;
  }
};

namespace detail {

inline void validate_partition(const JExpansion& J, const NefPartition& p) {
  const RingPtr& ring = J.ring;
  DivisorClass total = p.v0;
  for (const auto& vi : p.v) total += vi;
  if (total.to_exact(ring).coefficients() != exact_c1(ring).coefficients())
    throw std::invalid_argument("partition does not sum to c1");
  for (const auto& t : J.terms) {
    if (p.v0.pairing(t.d) < 0) throw NotNefError("v0 is not nef");
    for (const auto& vi : p.v)
      if (vi.pairing(t.d) < 0) throw NotNefError("partition part is not nef");
  }
}

}  // namespace detail

/// Series side of the nef-partition identities.
///   Section:    int_F prod v_i . z^{v_0} z^{deg/2} I~(tau_0 - sum v_i log s_i, -z) Gamma_F / prod Gamma(1 + v_i)
///   TotalSpace: int_F z^{v_0} z^{deg/2} I(tau_0 - sum v_i log(-s_i), -z) prod Gamma(1 - v_i)(1 - e^{2 pi i v_i})/(-v_i) Gamma_F
/// With an empty partition both reduce to rhs_ms_gamma.
inline SeriesValue rhs_generalized(const JExpansion& J, const GradedClass& gamma_F, const GradedClass& tau0,
                                   const NefPartition& partition, const std::vector<double>& s, double z, ISide side,
                                   Branch total_space_branch = branch::total_space) {
  if (!(z > 0.0)) throw std::domain_error("rhs_generalized needs z > 0");
  if (s.size() != partition.v.size()) throw std::invalid_argument("one s value per partition part is required");
  detail::require_degree_two(tau0, "tau0");
  detail::validate_partition(J, partition);
  const RingPtr& ring = J.ring;
  const auto I = i_function(J, partition.v, side);
  std::vector<GradedClass> v;
  for (const auto& vi : partition.v) v.push_back(vi.to_class(ring));
  GradedClass sigma = tau0 - partition.v0.to_class(ring) * Complex(std::log(z));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(s[i] > 0.0)) throw std::domain_error("rhs_generalized needs every s_i > 0");
    sigma -= v[i] * (side == ISide::Section ? Complex(std::log(s[i])) : log_on_branch(-s[i], total_space_branch));
  }
  GradedClass K(ring);
  if (side == ISide::Section) {
    K = gamma_of_quotient(gamma_F, v);
    for (const auto& vi : v) K = K * vi;
  } else {
    K = jump_factor(ring, v) * gamma_F;
  }
  return series_pairing(I, sigma, K);
}

/// Laplace transform of the monomial t^{-c_1 + m} against e^{s t}, s < 0:
/// (-s)^{c_1 - m - 1} Gamma(1 + m - c_1) = (-s)^{c_1 - m - 1} m! prod_{k=1}^m (1 - c_1/k) Gamma(1 - c_1).
inline GradedClass laplace_of_monomial(const RingPtr& ring, int m, double s) {
  if (!(s < 0.0) || m < 0) throw std::domain_error("laplace_of_monomial needs s < 0 and m >= 0");
  const GradedClass c1 = detail::c1_class(ring);
  GradedClass out = gamma_1p(-c1) * exp(c1 * Complex(std::log(-s))) * std::pow(-s, -m - 1.0);
  for (int k = 1; k <= m; ++k) out = out * (GradedClass::constant(ring, Complex(k)) - c1);
  return out;
}

namespace detail {

template <class R>
BasicClass<R> to_precision(const ExactClass& x) {
  std::vector<R> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = x[i].template convert_to<R>();
  return BasicClass<R>(x.ring(), std::move(c));
}

/// exp of a nilpotent class.
template <class R>
BasicClass<R> exp_at(const BasicClass<R>& x) {
  const int n = x.ring()->dim();
  std::vector<R> c(n + 1);
  R f = 1;
  for (int m = 0; m <= n; ++m) {
    if (m > 0) f /= m;
    c[m] = f;
  }
  return power_series<R>(x, c);
}

/// zeta(k) for an integer k >= 2 at the precision of R.  boost::math::zeta is avoided here: its
/// static initializer evaluates zeta at the full precision of every instantiated type, which
/// costs close to a minute at 2500 digits.
template <class R>
R zeta_int_at(int k) {
  using boost::math::constants::pi;
  if (k == 3) return boost::math::constants::zeta_three<R>();
  if (k % 2 == 0) {
    // zeta(2m) = (-1)^{m+1} B_{2m} (2 pi)^{2m} / (2 (2m)!)
    const R b = boost::math::bernoulli_b2n<R>(k / 2);
    R f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    const R v = b * pow(2 * pi<R>(), k) / (2 * f);
    return (k / 2) % 2 == 1 ? v : R(-v);
  }
  // Borwein's accelerated alternating series for eta(k) = (1 - 2^{1-k}) zeta(k); the error is
  // below 3 (3 + sqrt 8)^{-n}.
  const int n = static_cast<int>(std::ceil(std::numeric_limits<R>::digits10 * std::log(10.0) / std::log(3.0 + std::sqrt(8.0)))) + 2;
  std::vector<R> d(n + 1);
  R term = R(1) / n;  // (n + i - 1)! 4^i / ((n - i)! (2i)!) at i = 0, times n
  R acc = 0;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) term *= R(4) * (n + i - 1) * (n - i + 1) / (R(2 * i - 1) * (2 * i));
    acc += term;
    d[i] = n * acc;
  }
  R eta = 0;
  for (int j = 0; j < n; ++j) {
    const R t = (d[j] - d[n]) / pow(R(j + 1), k);
    eta += j % 2 == 0 ? t : R(-t);
  }
  eta = -eta / d[n];
  return eta / (1 - pow(R(2), 1 - k));
}

/// Gamma(1 + x) for nilpotent x, with the constants at the working precision of R.
template <class R>
BasicClass<R> gamma_1p_at(const BasicClass<R>& x) {
  const int n = x.ring()->dim();
  std::vector<R> lg(n + 1, R(0));
  if (n >= 1) lg[1] = -boost::math::constants::euler<R>();
  for (int k = 2; k <= n; ++k) lg[k] = (k % 2 == 0 ? R(1) : R(-1)) * zeta_int_at<R>(k) / k;
  return exp_at<R>(power_series<R>(x, lg));
}

template <class R>
BasicClass<R> gamma_class_at(const RingPtr& ring) {
  BasicClass<R> out = BasicClass<R>::unit(ring);
  for (int j = 0; j < ring->fan().num_rays(); ++j) out = out * gamma_1p_at<R>(to_precision<R>(exact_divisor(ring, j)));
  return out;
}

}  // namespace detail

struct ContinuationReport {
  double anchor = 0.0;           // u0 = -s0 where the series is summed
  double radius_estimate = 0.0;  // root-test estimate of the convergence radius in |s|
  int taylor_order = 0;
  double last_taylor_term = 0.0;
  double anchor_truncation = 0.0;  // worst relative last-degree share over all derivative orders
};

struct ContinuedValue {
  double value = 0.0;
  ContinuationReport report;
};

/// rhs_hcI_series analytically continued to s < 0 inside the disc of convergence of the series.
///
/// With u = -s the series is f(u) = sum_{d,m} A_{d,m} u^{-1-c_1.d} log^m u, convergent for u > T.
/// It is re-expanded in a Taylor series around an anchor u0 well inside the convergence region and
/// evaluated at u.  The only singularities of the continued function lie on u <= -T, so the Taylor
/// series converges at every u > 0.  Cancellation between curve classes is absorbed by 50-digit
/// arithmetic.  Only real tau is supported.
inline ContinuedValue rhs_hcI_continued(const RingPtr& ring, const GradedClass& tau, double s, int N = 240,
                                        double anchor = 0.0, double rel_tol = 1e-14, int max_order = 4000) {
  using R = boost::multiprecision::cpp_bin_float_50;
  using RClass = BasicClass<R>;
  if (!(s < 0.0)) throw std::domain_error("rhs_hcI_continued needs s < 0");
  detail::require_degree_two(tau, "tau");
  for (const auto& x : tau.coefficients())
    if (x.imag() != 0.0) throw std::invalid_argument("rhs_hcI_continued needs a real tau");
  const int n = ring->dim();

  auto to_r = [](const ExactClass& x) { return detail::to_precision<R>(x); };
  const RClass c1 = to_r(exact_c1(ring));
  const RClass gamma_hat = detail::gamma_class_at<R>(ring);
  const RClass gamma_one_minus_c1 = detail::gamma_1p_at<R>(-c1);
  RClass tau_r(ring);
  for (std::size_t i = 0; i < tau.size(); ++i) tau_r[i] = R(tau[i].real());
  const RClass base = detail::exp_at<R>(-tau_r) * gamma_one_minus_c1 * gamma_hat;

  // B_m = e^{-tau} c1^m / m! Gamma(1 - c1) Gamma_F, m = 0..n.
  std::vector<RClass> B;
  {
    RClass p = base;
    for (int m = 0; m <= n; ++m) {
      B.push_back(p);
      p = p * c1 * (R(1) / R(m + 1));
    }
  }

  const auto J = toric_j_coefficients(ring, N, JMethod::Exact);
  const auto I = i_function(J, {DivisorClass::anticanonical(ring->fan().num_rays())}, ISide::Section);
  struct Mono {
    int a;               // power u^{-a}
    std::vector<R> poly;  // coefficients in log u
  };
  std::vector<Mono> monos;
  for (const auto& t : I.terms) {
    if (!t.exact) throw std::logic_error("exact expansion expected");
    RClass at_minus_one = to_r(*t.exact);
    for (std::size_t i = 0; i < at_minus_one.size(); ++i)
      if (t.z_exponent(i) % 2 != 0) at_minus_one[i] = -at_minus_one[i];
    const int D = t.d.degree;
    const R tau_d = R(pair_with_curve(tau, t.d).real());
    const R pref = (D % 2 == 0 ? R(1) : R(-1)) * exp(tau_d);
    Mono mono{1 + D, std::vector<R>(n + 1)};
    bool nonzero = false;
    for (int m = 0; m <= n; ++m) {
      mono.poly[m] = pref * (B[m] * at_minus_one).integrate();
      nonzero = nonzero || mono.poly[m] != 0;
    }
    if (nonzero) monos.push_back(std::move(mono));
  }
  if (monos.size() < 3) throw TruncationError("too few nonvanishing terms to continue the series");

  ContinuedValue out;
  {
    // Root test on the two highest degrees present.
    auto mag = [&](const Mono& m) {
      R x = 0;
      for (const auto& c : m.poly) x = std::max(x, R(abs(c)));
      return x;
    };
    const auto& hi = monos[monos.size() - 1];
    const auto& lo = monos[monos.size() - 2];
    const R ratio = mag(hi) / mag(lo);
    out.report.radius_estimate = static_cast<double>(pow(ratio, R(1) / R(hi.a - lo.a)));
  }
  const double u = -s;
  const double u0 = anchor > 0.0 ? anchor : std::max(5.0 * out.report.radius_estimate, u);
  out.report.anchor = u0;
  const R U0 = R(u0);
  const R L0 = log(U0);
  const R delta = R(u) - U0;

  std::vector<std::vector<R>> Q;
  std::vector<R> upow;  // u0^{-a-k}
  for (const auto& m : monos) {
    Q.push_back(m.poly);
    upow.push_back(pow(U0, -m.a));
  }
  R sum = 0;
  R dk = 1;
  int quiet = 0;
  double worst_share = 0.0;
  int k = 0;
  for (; k <= max_order; ++k) {
    R ck = 0;
    R last_degree = 0;
    for (std::size_t t = 0; t < monos.size(); ++t) {
      R val = 0;
      for (int m = n; m >= 0; --m) val = val * L0 + Q[t][m];
      val *= upow[t];
      ck += val;
      if (t + 1 == monos.size()) last_degree = abs(val);
    }
    const R term = ck * dk;
    sum += term;
    if (ck != 0) worst_share = std::max(worst_share, static_cast<double>(last_degree / abs(ck)));
    if (abs(term) <= R(rel_tol) * abs(sum)) {
      if (++quiet >= 8) break;
    } else {
      quiet = 0;
    }
    out.report.last_taylor_term = static_cast<double>(abs(term));
    // Q_{k+1} = (-(a+k) Q_k + Q_k') / (k+1); u0^{-a-k-1}
    for (std::size_t t = 0; t < monos.size(); ++t) {
      auto& q = Q[t];
      const R ak = R(monos[t].a + k);
      for (int m = 0; m <= n; ++m) {
        const R deriv = m < n ? R(m + 1) * q[m + 1] : R(0);
        q[m] = (-ak * q[m] + deriv) / R(k + 1);
      }
      upow[t] /= U0;
    }
    dk *= delta;
  }
  out.report.taylor_order = k;
  out.report.anchor_truncation = worst_share;
  out.value = static_cast<double>(sum);
  if (k > max_order) throw TruncationError("Taylor re-expansion did not converge within the order limit");
  return out;
}

struct GammaIDirection {
  std::vector<double> j_direction;
  std::vector<double> gamma_direction;
  double angle = 0.0;
  double log10_angle = 0.0;  // stays meaningful after angle underflows a double
  int N = 0;
  int digits = 0;  // working precision in decimal digits
  TruncationReport truncation;
};

namespace detail {

template <unsigned Digits>
using Float = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>, boost::multiprecision::et_off>;

// Per ray, the classes prod_{k=1}^{m} (D + k)^{-1} for m >= 0 and prod_{k=m+1}^{0} (D + k) for m < 0.
template <class R>
class RayFactors {
 public:
  RayFactors(const BasicClass<R>& D, int lo, int hi) : lo_(lo) {
    const int n = D.ring()->dim();
    std::vector<BasicClass<R>> neg{BasicClass<R>::unit(D.ring())};
    for (int m = -1; m >= lo; --m) neg.push_back(neg.back() * (D + BasicClass<R>::constant(D.ring(), R(m + 1))));
    std::vector<BasicClass<R>> pos{BasicClass<R>::unit(D.ring())};
    std::vector<R> c(n + 1);
    for (int k = 1; k <= hi; ++k) {
      // (D + k)^{-1} = sum_i (-1)^i D^i / k^{i+1}
      R kinv = R(1) / k, power = kinv;
      for (int i = 0; i <= n; ++i) {
        c[i] = (i % 2 == 0 ? power : R(-power));
        power *= kinv;
      }
      pos.push_back(pos.back() * power_series<R>(D, c));
    }
    table_.assign(neg.rbegin(), neg.rend());
    table_.insert(table_.end(), pos.begin() + 1, pos.end());
  }
  const BasicClass<R>& at(int m) const { return table_.at(m - lo_); }

 private:
  int lo_;
  std::vector<BasicClass<R>> table_;
};

template <class R>
R max_abs_at(const BasicClass<R>& x) {
  R m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, R(abs(x[i])));
  return m;
}

template <class R>
std::vector<R> unit_vector(const BasicClass<R>& x) {
  R norm = 0;
  for (std::size_t i = 0; i < x.size(); ++i) norm += x[i] * x[i];
  norm = sqrt(norm);
  std::vector<R> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] / norm;
  return v;
}

// One attempt at a fixed precision and truncation.  The angle and the relative tail are also
// returned in R since both can be far below the range of a double.
template <class R>
struct GammaIAttempt {
  GammaIDirection out;
  R angle, last, tail;
};

template <class R>
GammaIAttempt<R> gamma_I_at(const RingPtr& ring, double t, int N) {
  const auto& fan = ring->fan();
  const int c = fan.num_rays();
  const auto classes = enumerate_curve_classes(fan, N);
  std::vector<int> lo(c, 0), hi(c, 0);
  for (const auto& d : classes)
    for (int j = 0; j < c; ++j) {
      lo[j] = std::min(lo[j], d.pairing[j]);
      hi[j] = std::max(hi[j], d.pairing[j]);
    }
  std::vector<RayFactors<R>> factors;
  for (int j = 0; j < c; ++j) factors.emplace_back(to_precision<R>(exact_divisor(ring, j)), lo[j], hi[j]);

  const R log_t = log(R(t));
  std::vector<R> t_power(N + 1, R(1));
  for (int D = 1; D <= N; ++D) t_power[D] = t_power[D - 1] * R(t);
  BasicClass<R> sum(ring);
  std::vector<R> by_degree(N + 1, R(0));
  for (const auto& d : classes) {
    BasicClass<R> term = factors[0].at(d.pairing[0]);
    for (int j = 1; j < c; ++j) term = term * factors[j].at(d.pairing[j]);
    term *= t_power[d.degree];
    by_degree[d.degree] = std::max(by_degree[d.degree], max_abs_at(term));
    sum += term;
  }
  const BasicClass<R> c1 = to_precision<R>(exact_c1(ring));
  const BasicClass<R> value = exp_at<R>(c1 * log_t) * sum;
  const R total = max_abs_at(value);

  GammaIDirection out;
  out.N = N;
  out.digits = std::numeric_limits<R>::digits10;
  std::vector<int> present;
  for (const auto& d : classes)
    if (present.empty() || present.back() != d.degree) present.push_back(d.degree);
  const R last = by_degree[present.back()] / total;
  const R previous = present.size() > 1 ? R(by_degree[present[present.size() - 2]] / total) : R(0);
  out.truncation.N = N;
  out.truncation.total_magnitude = 1.0;
  R tail = 0;
  if (last > 0) tail = previous > last ? R(last * (last / previous) / (1 - last / previous)) : R(std::numeric_limits<R>::infinity());
  out.truncation.last_degree_contribution = static_cast<double>(last);
  out.truncation.estimated_tail = static_cast<double>(tail);

  const auto u = unit_vector(value);
  const auto v = unit_vector(gamma_class_at<R>(ring));
  R dot = 0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  // 2 asin(|u - v|/2) keeps full relative accuracy for tiny angles, unlike acos.
  R gap = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const R e = u[i] - (dot < 0 ? R(-v[i]) : v[i]);
    gap += e * e;
  }
  const R angle = 2 * asin(sqrt(gap) / 2);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.j_direction.push_back(static_cast<double>(u[i]));
    out.gamma_direction.push_back(static_cast<double>(v[i]));
  }
  out.angle = static_cast<double>(angle);
  out.log10_angle = angle > 0 ? static_cast<double>(log10(angle)) : -std::numeric_limits<double>::infinity();
  return {out, angle, last, tail};
}

template <class R>
std::optional<GammaIDirection> gamma_I_with(const RingPtr& ring, double t, int N, bool automatic, double tail_tol,
                                            int max_N) {
  const R floor = pow(R(10), -(std::numeric_limits<R>::digits10 - 20));
  while (true) {
    auto [out, angle, last, tail] = gamma_I_at<R>(ring, t, N);
    // The tail must be negligible both absolutely and against the angle it is meant to resolve.
    const R limit = std::min(R(tail_tol), R(angle / 1000000));
    const bool tail_ok = last <= limit && tail <= limit;
    const bool resolved = angle > floor;
    if (tail_ok || !automatic || N >= max_N) {
      if (!resolved) return std::nullopt;
      if (!tail_ok && last > tail_tol)
        throw TruncationError("gamma_I_direction: truncation at N = " + std::to_string(N) + " leaves a tail above tolerance");
      return out;
    }
    if (!resolved) return std::nullopt;
    N = std::min(2 * N, max_N);
  }
}

}  // namespace detail

/// Directions of J_F(c_1 log t, 1) and Gamma_F in the ring basis and the angle between the lines.
/// The angle decays exponentially in t, so the evaluation escalates through binary floating
/// precisions until the angle sits well above the working epsilon.  With N = 0 the truncation
/// starts at 4t and doubles until the last degree is below tail_tol and below the angle.
inline GammaIDirection gamma_I_direction(const RingPtr& ring, double t, int N = 0, double tail_tol = 1e-10,
                                         int max_N = 1 << 15) {
  if (!(t >= 1.0)) throw std::domain_error("gamma_I_direction needs t >= 1");
  const bool automatic = N <= 0;
  const int start = automatic ? std::max(8, static_cast<int>(std::ceil(4.0 * t))) : N;
  if (auto r = detail::gamma_I_with<detail::Float<50>>(ring, t, start, automatic, tail_tol, max_N)) return *r;
  if (auto r = detail::gamma_I_with<detail::Float<160>>(ring, t, start, automatic, tail_tol, max_N)) return *r;
  if (auto r = detail::gamma_I_with<detail::Float<500>>(ring, t, start, automatic, tail_tol, max_N)) return *r;
  if (auto r = detail::gamma_I_with<detail::Float<1200>>(ring, t, start, automatic, tail_tol, max_N)) return *r;
  if (auto r = detail::gamma_I_with<detail::Float<2500>>(ring, t, start, automatic, tail_tol, max_N)) return *r;
  // Below every available precision: report the angle as the last precision's floor.
  auto out = detail::gamma_I_at<detail::Float<2500>>(ring, t, start).out;
  out.log10_angle = -(out.digits - 20);
  out.angle = 0.0;
  return out;
}

}  // namespace mirrorgamma
