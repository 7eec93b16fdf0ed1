#pragma once

// Quadrature over intersections of sublevel sets {W_i(e^t) <= s_i} in logarithmic coordinates.
// Each constraint is a log-sum-exp of linear forms, hence convex.  The region is integrated as
// nested one-dimensional tanh-sinh integrals; along each axis the admissible set is an interval
// whose ends are roots of a convex function, found exactly rather than by masking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "mirrorgamma/mirror/assumptions.hpp"
#include "mirrorgamma/mirror/laurent.hpp"

namespace mirrorgamma {

struct Constraint {
  LaurentPoly W;
  double level = 0.0;  // W(e^t) <= level
};

/// Axis-aligned box containing the region.  Each term gives c_j e^{b_j.t} <= level, so the region
/// lies in a polyhedron whose vertices bound it; vertices are found by enumerating n-subsets of
/// the facets.  Throws if the polyhedron is unbounded.
inline std::pair<std::vector<double>, std::vector<double>> bounding_box(const std::vector<Constraint>& cs, int n) {
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> rhs;
  for (const auto& c : cs) {
    if (!(c.level > 0.0)) throw std::invalid_argument("sublevel bounds must be positive");
    for (const auto& t : c.W.terms()) {
      Eigen::VectorXd b(n);
      for (int a = 0; a < n; ++a) b[a] = t.exponent[a];
      if (b.isZero()) continue;
      normals.push_back(b);
      rhs.push_back(std::log(c.level / t.coeff));
    }
  }
  const std::size_t m = normals.size();
  std::vector<double> lo(n, std::numeric_limits<double>::infinity()), hi(n, -std::numeric_limits<double>::infinity());
  std::vector<int> pick(n);
  // Enumerate n-subsets in lexicographic order.
  for (int a = 0; a < n; ++a) pick[a] = a;
  bool any = false;
  double scale = 1.0;
  for (double r : rhs) scale = std::max(scale, std::abs(r));
  while (m >= static_cast<std::size_t>(n)) {
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd r(n);
    for (int a = 0; a < n; ++a) {
      A.row(a) = normals[pick[a]].transpose();
      r[a] = rhs[pick[a]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.isInvertible()) {
      const Eigen::VectorXd v = lu.solve(r);
      bool feasible = true;
      for (std::size_t k = 0; k < m && feasible; ++k) feasible = normals[k].dot(v) <= rhs[k] + 1e-9 * scale;
      if (feasible) {
        any = true;
        for (int a = 0; a < n; ++a) {
          lo[a] = std::min(lo[a], v[a]);
          hi[a] = std::max(hi[a], v[a]);
        }
      }
    }
    int a = n - 1;
    while (a >= 0 && pick[a] == static_cast<int>(m) - n + a) --a;
    if (a < 0) break;
    ++pick[a];
    for (int k = a + 1; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  if (!any) throw std::invalid_argument("region is unbounded or empty: the exponents do not surround the origin");
  // The polyhedron is bounded exactly when its normals surround the origin.
  std::vector<LaurentTerm> all;
  for (const auto& c : cs)
    for (const auto& t : c.W.terms()) all.push_back({1.0, t.exponent});
  if (!check_assumptions(LaurentPoly(n, all)).origin_interior)
    throw std::invalid_argument("region is unbounded: the exponents do not surround the origin");
  for (int a = 0; a < n; ++a) {
    const double pad = 1e-6 * (1.0 + hi[a] - lo[a]) + 1e-3;
    lo[a] -= pad;
    hi[a] += pad;
  }
  return {lo, hi};
}

struct RegionIntegral {
  double value = 0.0;
  double error = 0.0;
  long long evaluations = 0;
  bool empty = false;
};

class ConvexRegion {
 public:
  ConvexRegion(std::vector<Constraint> cs, int n) : cs_(std::move(cs)), n_(n) {
    auto [lo, hi] = bounding_box(cs_, n_);
    lo_ = std::move(lo);
    hi_ = std::move(hi);
  }

  int dim() const { return n_; }
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }

  /// max_i log(W_i(e^t) / s_i); the region is {G <= 0}.
  double G(const double* t) const {
    double g = -std::numeric_limits<double>::infinity();
    for (const auto& c : cs_) g = std::max(g, std::log(c.W(t)) - std::log(c.level));
    return g;
  }

  /// Minimum of G over the box with coordinates before k fixed in t; returns the minimizer in t.
  double min_from(int k, std::vector<double>& t) const {
    if (k == n_) return G(t.data());
    auto phi = [&](double x) {
      t[k] = x;
      return min_from(k + 1, t);
    };
    const auto [x, v] = boost::math::tools::brent_find_minima(phi, lo_[k], hi_[k], 40);
    t[k] = x;
    return min_from(k + 1, t);
  }

  /// Smallest value of G and a point attaining it (a feasible point when the region is nonempty).
  std::pair<double, std::vector<double>> minimum() const {
    std::vector<double> t(n_, 0.0);
    const double g = min_from(0, t);
    return {g, t};
  }

  /// Interval of t_k inside the projection of the region, given t_0..t_{k-1}; false if empty.
  bool slice(int k, std::vector<double>& t, double& a, double& b) const {
    auto phi = [&](double x) {
      t[k] = x;
      return min_from(k + 1, t);
    };
    const auto [xm, vm] = boost::math::tools::brent_find_minima(phi, lo_[k], hi_[k], 40);
    if (!(vm < 0.0)) return false;
    boost::math::tools::eps_tolerance<double> tol(50);
    auto root = [&](double outside, double inside) {
      if (phi(outside) <= 0.0) return outside;
      std::uintmax_t iters = 100;
      const auto r = boost::math::tools::toms748_solve(phi, std::min(outside, inside), std::max(outside, inside), tol, iters);
      return 0.5 * (r.first + r.second);
    };
    a = root(lo_[k], xm);
    b = root(hi_[k], xm);
    return b > a;
  }

  /// Integral of f over the region with nested tanh-sinh rules.
  RegionIntegral integrate(const std::function<double(const double*)>& f, double tol = 1e-12) const {
    RegionIntegral out;
    if (!(minimum().first < 0.0)) {
      out.empty = true;
      return out;
    }
    std::vector<boost::math::quadrature::tanh_sinh<double>> rules;
    for (int k = 0; k < n_; ++k) rules.emplace_back(k == 0 ? 12 : 10);
    std::vector<double> t(n_, 0.0);
    double outer_error = 0.0;
    std::function<double(int)> level = [&](int k) -> double {
      if (k == n_) {
        ++out.evaluations;
        return f(t.data());
      }
      std::vector<double> saved(t.begin(), t.begin() + k);
      double a = 0.0, b = 0.0;
      if (!slice(k, t, a, b)) return 0.0;
      auto inner = [&](double x) {
        std::copy(saved.begin(), saved.end(), t.begin());
        t[k] = x;
        return level(k + 1);
      };
      // Slices this thin only occur at the rim of the projection; the rule cannot place nodes there.
      if (b - a <= 1e-10 * (1.0 + std::abs(a) + std::abs(b))) return inner(0.5 * (a + b)) * (b - a);
      // Tighter tolerances inside keep the outer rules from chasing inner noise.
      const double level_tol = tol * std::pow(0.1, k);
      double err = 0.0, L1 = 0.0;
      // Integrate on the canonical interval: the [a, b] overload of this Boost release can
      // round abscissas onto the endpoints.
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      const double v = half * rules[k].integrate([&](double u) { return inner(mid + half * u); }, level_tol, &err, &L1);
      err *= half;
      if (k == 0) outer_error = err;
      return v;
    };
    out.value = level(0);
    out.error = outer_error;
    return out;
  }

 private:
  std::vector<Constraint> cs_;
  int n_;
  std::vector<double> lo_, hi_;
};

}  // namespace mirrorgamma
