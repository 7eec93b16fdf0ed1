#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mirrorgamma {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Natural log of |x| for arbitrarily large integers without passing through double.
inline double log_abs(const BigInt& x) {
  if (x == 0) return -INFINITY;
  BigInt a = abs(x);
  const unsigned msb = boost::multiprecision::msb(a);
  if (msb < 900) return std::log(a.convert_to<double>());
  const unsigned shift = msb - 60;
  a >>= shift;
  return std::log(a.convert_to<double>()) + shift * std::log(2.0);
}

inline double log_abs(const Rational& q) {
  return log_abs(boost::multiprecision::numerator(q)) - log_abs(boost::multiprecision::denominator(q));
}

inline std::string to_string(const Rational& q) { return q.str(); }

}  // namespace mirrorgamma
