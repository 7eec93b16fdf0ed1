#pragma once

// Integer combinations of toric divisors and their pairing with curve classes.

#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorgamma/classes/graded_class.hpp"
#include "mirrorgamma/toric/curves.hpp"

namespace mirrorgamma {

/// sum_j a_j D_j with integer coefficients, one per ray.
struct DivisorClass {
  std::vector<int> coeff;

  static DivisorClass ray(int num_rays, int j) {
    DivisorClass v{std::vector<int>(num_rays, 0)};
    v.coeff.at(j) = 1;
    return v;
  }
  static DivisorClass sum_of(int num_rays, const std::vector<int>& rays) {
    DivisorClass v{std::vector<int>(num_rays, 0)};
    for (int j : rays) v.coeff.at(j) += 1;
    return v;
  }
  static DivisorClass anticanonical(int num_rays) { return DivisorClass{std::vector<int>(num_rays, 1)}; }

  int pairing(const CurveClass& d) const {
    if (d.pairing.size() != coeff.size()) throw std::invalid_argument("divisor and curve class have different ray counts");
    int s = 0;
    for (std::size_t j = 0; j < coeff.size(); ++j) s += coeff[j] * d.pairing[j];
    return s;
  }

  ExactClass to_exact(const RingPtr& ring) const {
    if (static_cast<int>(coeff.size()) != ring->fan().num_rays()) throw std::invalid_argument("divisor has wrong length");
    ExactClass out(ring);
    for (std::size_t j = 0; j < coeff.size(); ++j)
      if (coeff[j] != 0) out += exact_divisor(ring, static_cast<int>(j)) * Rational(coeff[j]);
    return out;
  }
  GradedClass to_class(const RingPtr& ring) const { return to_complex(to_exact(ring)); }

  DivisorClass& operator+=(const DivisorClass& o) {
    for (std::size_t j = 0; j < coeff.size(); ++j) coeff[j] += o.coeff.at(j);
    return *this;
  }
  friend DivisorClass operator+(DivisorClass a, const DivisorClass& b) { return a += b; }
  friend DivisorClass operator-(DivisorClass a, const DivisorClass& b) {
    for (std::size_t j = 0; j < a.coeff.size(); ++j) a.coeff[j] -= b.coeff.at(j);
    return a;
  }
  bool operator==(const DivisorClass&) const = default;
};

/// tau . d for a degree-2 class tau; the degree-2 basis consists of the free divisors.
inline Complex pair_with_curve(const GradedClass& tau, const CurveClass& d) {
  const auto& ring = tau.ring();
  const auto& free = ring->free_rays();
  const std::size_t off = ring->degree_offset(1);
  Complex s = 0;
  for (std::size_t v = 0; v < free.size(); ++v) s += tau[off + v] * static_cast<double>(d.pairing[free[v]]);
  return s;
}

/// -sum_j lambda_j D_j, the Kaehler parameter matching the mirror with coefficients e^{-lambda_j}.
inline GradedClass kahler_class(const RingPtr& ring, const std::vector<double>& lambda) {
  if (static_cast<int>(lambda.size()) != ring->fan().num_rays()) throw std::invalid_argument("lambda needs one entry per ray");
  GradedClass tau(ring);
  for (std::size_t j = 0; j < lambda.size(); ++j)
    if (lambda[j] != 0.0) tau += to_complex(exact_divisor(ring, static_cast<int>(j))) * Complex(-lambda[j]);
  return tau;
}

}  // namespace mirrorgamma
