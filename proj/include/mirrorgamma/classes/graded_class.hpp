#pragma once

// Classes in H^*(F) with coefficients in a scalar field.  Positive-degree classes are
// nilpotent, so every analytic function of a class is a finite polynomial.

#include <cassert>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <ostream>
#include <vector>

#include "mirrorgamma/rational.hpp"
#include "mirrorgamma/toric/cohomology.hpp"

namespace mirrorgamma {

using Complex = std::complex<double>;
using RingPtr = std::shared_ptr<const CohRing>;

namespace detail {

template <class Scalar>
Scalar from_rational(const Rational& q) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return q;
  else if constexpr (std::is_same_v<Scalar, double> || std::is_same_v<Scalar, std::complex<double>>)
    return Scalar(to_double(q));
  else
    return q.template convert_to<Scalar>();
}

}  // namespace detail

template <class Scalar>
class BasicClass {
 public:
  using scalar_type = Scalar;

  BasicClass() = default;
  explicit BasicClass(RingPtr ring) : ring_(std::move(ring)), coeff_(ring_->size(), Scalar(0)) {}
  BasicClass(RingPtr ring, std::vector<Scalar> coeff) : ring_(std::move(ring)), coeff_(std::move(coeff)) {
    if (coeff_.size() != ring_->size()) throw std::invalid_argument("class has wrong number of coefficients");
  }

  static BasicClass unit(const RingPtr& ring) { return constant(ring, Scalar(1)); }
  static BasicClass constant(const RingPtr& ring, Scalar value) {
    BasicClass out(ring);
    out.coeff_[0] = value;
    return out;
  }

  const RingPtr& ring() const { return ring_; }
  std::size_t size() const { return coeff_.size(); }
  const Scalar& operator[](std::size_t i) const { return coeff_[i]; }
  Scalar& operator[](std::size_t i) { return coeff_[i]; }
  const std::vector<Scalar>& coefficients() const { return coeff_; }

  /// Coefficient of the unit class.
  const Scalar& constant_term() const { return coeff_[0]; }

  /// Component in H^{2k}.
  BasicClass degree_part(int k) const {
    BasicClass out(ring_);
    for (std::size_t i = ring_->degree_offset(k); i < ring_->degree_offset(k + 1); ++i) out.coeff_[i] = coeff_[i];
    return out;
  }

  bool is_homogeneous(int k) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (ring_->degree(i) != k && coeff_[i] != Scalar(0)) return false;
    return true;
  }

  BasicClass& operator+=(const BasicClass& o) {
    for (std::size_t i = 0; i < size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
  }
  BasicClass& operator-=(const BasicClass& o) {
    for (std::size_t i = 0; i < size(); ++i) coeff_[i] -= o.coeff_[i];
    return *this;
  }
  BasicClass& operator*=(const Scalar& s) {
    for (auto& x : coeff_) x *= s;
    return *this;
  }

  friend BasicClass operator+(BasicClass a, const BasicClass& b) { return a += b; }
  friend BasicClass operator-(BasicClass a, const BasicClass& b) { return a -= b; }
  friend BasicClass operator-(BasicClass a) {
    for (auto& x : a.coeff_) x = -x;
    return a;
  }
  friend BasicClass operator*(BasicClass a, const Scalar& s) { return a *= s; }
  friend BasicClass operator*(const Scalar& s, BasicClass a) { return a *= s; }

  friend BasicClass operator*(const BasicClass& a, const BasicClass& b) {
    BasicClass out(a.ring_);
    for (const auto& p : a.ring_->products()) {
      if (a.coeff_[p.i] == Scalar(0) || b.coeff_[p.j] == Scalar(0)) continue;
      if constexpr (std::is_same_v<Scalar, double> || std::is_same_v<Scalar, std::complex<double>>)
        out.coeff_[p.k] += a.coeff_[p.i] * b.coeff_[p.j] * p.value_d;
      else
        out.coeff_[p.k] += a.coeff_[p.i] * b.coeff_[p.j] * detail::from_rational<Scalar>(p.value);
    }
    return out;
  }
  BasicClass& operator*=(const BasicClass& o) { return *this = *this * o; }
  friend bool operator==(const BasicClass& a, const BasicClass& b) { return a.ring_ == b.ring_ && a.coeff_ == b.coeff_; }
  friend std::ostream& operator<<(std::ostream& os, const BasicClass& a) {
    os << '[';
    for (std::size_t i = 0; i < a.coeff_.size(); ++i) os << (i ? ", " : "") << a.coeff_[i];
    return os << ']';
  }

  Scalar integrate() const {
    const std::size_t top = ring_->top_index();
    return coeff_[top] * detail::from_rational<Scalar>(ring_->top_integral());
  }

 private:
  RingPtr ring_;
  std::vector<Scalar> coeff_;
};

using ExactClass = BasicClass<Rational>;
using GradedClass = BasicClass<Complex>;
using RealClass = BasicClass<double>;

inline GradedClass to_complex(const ExactClass& x) {
  std::vector<Complex> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = to_double(x[i]);
  return GradedClass(x.ring(), std::move(c));
}

inline GradedClass to_complex(const RealClass& x) {
  std::vector<Complex> c(x.coefficients().begin(), x.coefficients().end());
  return GradedClass(x.ring(), std::move(c));
}

inline ExactClass exact_divisor(const RingPtr& ring, int j) { return ExactClass(ring, ring->divisor(j)); }
inline ExactClass exact_c1(const RingPtr& ring) { return ExactClass(ring, ring->c1()); }

/// sum_m coeffs[m] x^m for x with vanishing constant term; terms beyond the ring dimension vanish.
template <class Scalar>
BasicClass<Scalar> power_series(const BasicClass<Scalar>& x, std::span<const Scalar> coeffs) {
  if (x.constant_term() != Scalar(0)) throw std::invalid_argument("power_series needs a nilpotent argument");
  BasicClass<Scalar> out(x.ring());
  BasicClass<Scalar> power = BasicClass<Scalar>::unit(x.ring());
  const int n = x.ring()->dim();
  for (int m = 0; m <= n && m < static_cast<int>(coeffs.size()); ++m) {
    out += power * coeffs[m];
    power = power * x;
  }
  return out;
}

namespace detail {

template <class Scalar>
BasicClass<Scalar> nilpotent_part(const BasicClass<Scalar>& x) {
  BasicClass<Scalar> y = x;
  y[0] = Scalar(0);
  return y;
}

template <class Scalar>
Scalar scalar_factorial_inverse(int m) {
  Scalar f(1);
  for (int k = 2; k <= m; ++k) f = f / Scalar(k);
  return f;
}

}  // namespace detail

/// exp(x) = e^{x_0} * sum_m y^m/m! with y the nilpotent part.
inline GradedClass exp(const GradedClass& x) {
  const int n = x.ring()->dim();
  std::vector<Complex> c(n + 1);
  for (int m = 0; m <= n; ++m) c[m] = detail::scalar_factorial_inverse<Complex>(m);
  return power_series<Complex>(detail::nilpotent_part(x), c) * std::exp(x.constant_term());
}

/// exp of a nilpotent exact class.
inline ExactClass exp_nilpotent(const ExactClass& x) {
  const int n = x.ring()->dim();
  std::vector<Rational> c(n + 1);
  for (int m = 0; m <= n; ++m) c[m] = detail::scalar_factorial_inverse<Rational>(m);
  return power_series<Rational>(x, c);
}

/// Multiplicative inverse of a class with invertible constant term.
template <class Scalar>
BasicClass<Scalar> inverse(const BasicClass<Scalar>& x) {
  const Scalar x0 = x.constant_term();
  if (x0 == Scalar(0)) throw std::domain_error("class is not invertible");
  BasicClass<Scalar> y = detail::nilpotent_part(x) * (Scalar(1) / x0);
  const int n = x.ring()->dim();
  std::vector<Scalar> c(n + 1);
  for (int m = 0; m <= n; ++m) c[m] = (m % 2 == 0) ? Scalar(1) : Scalar(-1);
  return power_series<Scalar>(y, c) * (Scalar(1) / x0);
}

/// log(x) for x with constant term 1.
inline GradedClass log_unipotent(const GradedClass& x) {
  if (std::abs(x.constant_term() - Complex(1)) > 1e-15) throw std::domain_error("log needs constant term 1");
  const int n = x.ring()->dim();
  std::vector<Complex> c(n + 1);
  for (int m = 1; m <= n; ++m) c[m] = Complex((m % 2 == 1 ? 1.0 : -1.0) / m);
  return power_series<Complex>(detail::nilpotent_part(x), c);
}

inline double max_abs(const GradedClass& x) {
  double m = 0;
  for (const auto& v : x.coefficients()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace mirrorgamma
