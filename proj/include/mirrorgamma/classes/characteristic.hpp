#pragma once

// Gamma classes, branch-dependent factors and the grading operator z^alpha z^{deg/2}.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "mirrorgamma/classes/graded_class.hpp"

namespace mirrorgamma {

namespace constants {

inline constexpr long double euler_gamma = 0.577215664901532860606512090082L;

// zeta(k) for k = 0..8; entries 0 and 1 unused.
inline constexpr std::array<long double, 9> zeta = {
    0.0L,
    0.0L,
    1.64493406684822643647241516665L,
    1.20205690315959428539973816151L,
    1.08232323371113819151600369654L,
    1.03692775514336992633136548646L,
    1.01734306198444913971451792979L,
    1.00834927738192282683979754985L,
    1.00407735619794433937868523851L,
};

inline constexpr int max_supported_dim = 8;

}  // namespace constants

/// Imaginary part of the logarithm assigned to a real argument.  Identities that pass
/// through the cut of log are only valid with the branch fixed by the caller.
struct Branch {
  double imag = 0.0;
};

namespace branch {
/// Real logarithm of a positive argument.
inline constexpr Branch principal{0.0};
/// log(-s) for s > 0 on the canonical-bundle side: Im log(-s) = -pi.
inline constexpr Branch total_space{-std::numbers::pi};
/// log(s) for s < 0 in the Laplace-transform series: Im log s = +pi.
inline constexpr Branch laplace{std::numbers::pi};
}  // namespace branch

/// log of a nonzero real number on the given branch; the branch must be compatible with the sign.
inline Complex log_on_branch(double x, Branch b) {
  if (x == 0.0) throw std::domain_error("logarithm of zero");
  const double turns = b.imag / std::numbers::pi;
  const long k = std::lround(turns);
  if (std::abs(turns - static_cast<double>(k)) > 1e-12 || ((k % 2 != 0) != (x < 0)))
    throw std::domain_error("branch is incompatible with the sign of the argument");
  return {std::log(std::abs(x)), b.imag};
}

/// Taylor coefficients of log Gamma(1+x) = -gamma x + sum_{k>=2} (-1)^k zeta(k) x^k / k.
inline std::vector<Complex> log_gamma_1p_coefficients(int degree) {
  if (degree > constants::max_supported_dim) throw std::domain_error("zeta values are tabulated up to degree 8");
  std::vector<Complex> c(degree + 1, Complex(0));
  if (degree >= 1) c[1] = -static_cast<double>(constants::euler_gamma);
  for (int k = 2; k <= degree; ++k) c[k] = static_cast<double>(((k % 2 == 0) ? 1.0L : -1.0L) * constants::zeta[k] / k);
  return c;
}

/// Gamma(1 + x) for a class x with vanishing constant term.
inline GradedClass gamma_1p(const GradedClass& x) {
  const auto c = log_gamma_1p_coefficients(x.ring()->dim());
  return exp(power_series<Complex>(x, c));
}

/// Gamma class prod_j Gamma(1 + D_j) of a toric variety.
inline GradedClass gamma_class(const RingPtr& ring) {
  const auto c = log_gamma_1p_coefficients(ring->dim());
  GradedClass log_total(ring);
  for (int j = 0; j < ring->fan().num_rays(); ++j) log_total += power_series<Complex>(to_complex(exact_divisor(ring, j)), c);
  return exp(log_total);
}

/// Gamma_F * prod_i Gamma(1 + v_i)^{-1}: the Gamma class of a complete intersection cut out by
/// sections of line bundles with first Chern classes v_i, as an F-level class.
inline GradedClass gamma_of_quotient(const GradedClass& gamma_F, std::span<const GradedClass> v) {
  GradedClass out = gamma_F;
  for (const auto& vi : v) {
    if (!vi.is_homogeneous(1)) throw std::invalid_argument("gamma_of_quotient expects degree-2 classes");
    out = out * inverse(gamma_1p(vi));
  }
  return out;
}

/// z^alpha z^{deg/2} x with z = exp(log_z); the logarithm fixes the branch of z^alpha.
inline GradedClass grading_operator(const GradedClass& x, const GradedClass& alpha, Complex log_z) {
  if (!alpha.is_homogeneous(1) && max_abs(alpha) != 0.0) throw std::invalid_argument("alpha must be a degree-2 class");
  GradedClass scaled = x;
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] *= std::exp(static_cast<double>(x.ring()->degree(i)) * log_z);
  return exp(alpha * log_z) * scaled;
}

inline GradedClass grading_operator(const GradedClass& x, const GradedClass& alpha, double z, Branch b) {
  return grading_operator(x, alpha, log_on_branch(z, b));
}

/// (1 - e^{2 pi i x}) / (-x) as the entire series sum_{m>=0} (2 pi i)^{m+1} x^m / (m+1)!.
inline GradedClass cut_jump_series(const GradedClass& x) {
  const int n = x.ring()->dim();
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  std::vector<Complex> c(n + 1);
  Complex power = two_pi_i;
  double fact = 1.0;
  for (int m = 0; m <= n; ++m) {
    c[m] = power / fact;
    power *= two_pi_i;
    fact *= (m + 2);
  }
  return power_series<Complex>(x, c);
}

/// prod_i Gamma(1 - v_i) (1 - e^{2 pi i v_i}) / (-v_i).  Pairs the series side with the
/// zero-section structure sheaf of a sum of anti-nef line bundles.
inline GradedClass jump_factor(const RingPtr& ring, std::span<const GradedClass> v) {
  GradedClass out = GradedClass::unit(ring);
  for (const auto& vi : v) {
    if (!vi.is_homogeneous(1)) throw std::invalid_argument("jump_factor expects degree-2 classes");
    out = out * gamma_1p(-vi) * cut_jump_series(vi);
  }
  return out;
}

/// e^{-pi i v} Gamma(1 - v): the per-factor class of the Laplace-transform series.
inline GradedClass laplace_factor(const GradedClass& v) {
  if (!v.is_homogeneous(1)) throw std::invalid_argument("laplace_factor expects a degree-2 class");
  return exp(v * Complex(0.0, -std::numbers::pi)) * gamma_1p(-v);
}

}  // namespace mirrorgamma
