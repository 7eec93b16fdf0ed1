#pragma once

// Cohomology ring of a smooth projective toric variety, computed exactly over Q.
//
// Divisors D_i of a reference maximal cone sigma_0 are eliminated with the linear relations,
// leaving the polynomial ring in the remaining c - n divisors.  Each graded piece of the
// Stanley-Reisner ideal is row-reduced over the monomials of that degree; the non-pivot
// monomials form the basis of the quotient.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorgamma/detail/exact_linalg.hpp"
#include "mirrorgamma/rational.hpp"
#include "mirrorgamma/toric/fan.hpp"

namespace mirrorgamma {

namespace detail {

using Exponent = std::vector<int>;
using Poly = std::map<Exponent, Rational>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exponent e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

// All exponent vectors with `vars` entries summing to `degree`, in descending lex order.
inline std::vector<Exponent> monomials_of_degree(int vars, int degree) {
  std::vector<Exponent> out;
  Exponent e(vars, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == vars - 1) {
      e[pos] = left;
      out.push_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  if (vars == 0) {
    if (degree == 0) out.push_back({});
    return out;
  }
  rec(rec, 0, degree);
  return out;
}

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

}  // namespace detail

/// Finite-dimensional graded ring H^*(F; Q) with exact structure constants.
class CohRing {
 public:
  static std::shared_ptr<const CohRing> build(const FanData& fan) {
    return std::shared_ptr<const CohRing>(new CohRing(fan));
  }

  const FanData& fan() const { return fan_; }
  int dim() const { return fan_.dim; }
  std::size_t size() const { return degree_.size(); }

  /// Half-degree k of basis element i (i lies in H^{2k}).
  int degree(std::size_t i) const { return degree_[i]; }
  std::size_t degree_offset(int k) const { return offset_[k]; }
  std::size_t degree_count(int k) const { return offset_[k + 1] - offset_[k]; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  std::size_t top_index() const { return offset_[dim()]; }

  /// Structure constant: basis_i * basis_j = sum_k mult(i,j,k) basis_k.
  const Rational& mult(std::size_t i, std::size_t j, std::size_t k) const { return mult_[(i * size() + j) * size() + k]; }
  double mult_double(std::size_t i, std::size_t j, std::size_t k) const { return mult_d_[(i * size() + j) * size() + k]; }

  /// Nonzero products of basis elements, for sparse loops.
  struct Product {
    std::size_t i, j, k;
    Rational value;
    double value_d;
  };
  const std::vector<Product>& products() const { return products_; }

  /// Integral of the top basis element (other basis elements integrate to zero).
  const Rational& top_integral() const { return top_integral_; }

  const std::vector<Rational>& divisor(int j) const { return divisors_[j]; }
  const std::vector<Rational>& c1() const { return c1_; }

  /// Rays whose divisors form the degree-2 basis, in basis order.
  const std::vector<int>& free_rays() const { return free_rays_; }

  std::vector<Rational> multiply(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    std::vector<Rational> out(size());
    for (const auto& p : products_) {
      if (a[p.i] == 0 || b[p.j] == 0) continue;
      out[p.k] += a[p.i] * b[p.j] * p.value;
    }
    return out;
  }

  Rational integrate(const std::vector<Rational>& a) const { return a[top_index()] * top_integral_; }

  std::vector<Rational> unit() const {
    std::vector<Rational> u(size());
    u[0] = 1;
    return u;
  }

  /// Dimension of H^{2k} predicted by the h-vector of the fan.
  int betti_from_fan(int k) const { return betti_[k]; }

 private:
  explicit CohRing(const FanData& fan) : fan_(fan) { construct(); }

  void construct();

  FanData fan_;
  std::vector<int> degree_;
  std::vector<std::size_t> offset_;
  std::vector<std::string> labels_;
  std::vector<Rational> mult_;
  std::vector<double> mult_d_;
  std::vector<Product> products_;
  Rational top_integral_;
  std::vector<std::vector<Rational>> divisors_;
  std::vector<Rational> c1_;
  std::vector<int> free_rays_;
  std::vector<int> betti_;
};

inline void CohRing::construct() {
  using namespace detail;
  const int n = fan_.dim;
  const int c = fan_.num_rays();
  const auto& sigma0 = fan_.max_cones.front();
  for (int j = 0; j < c; ++j)
    if (!std::binary_search(sigma0.begin(), sigma0.end(), j)) free_rays_.push_back(j);
  const int r = static_cast<int>(free_rays_.size());

  // D_j as linear forms in the free divisors.
  auto binv = inverse(fan_.cone_matrix(sigma0));
  std::vector<Poly> lin(c);
  for (int v = 0; v < r; ++v) {
    Exponent e(r, 0);
    e[v] = 1;
    lin[free_rays_[v]][e] = 1;
  }
  for (int p = 0; p < n; ++p) {
    Poly form;
    for (int v = 0; v < r; ++v) {
      Rational pairing = 0;
      for (int k = 0; k < n; ++k) pairing += (*binv)[p][k] * fan_.rays[free_rays_[v]][k];
      if (pairing != 0) {
        Exponent e(r, 0);
        e[v] = 1;
        form[e] = -pairing;
      }
    }
    lin[sigma0[p]] = form;
  }

  // Minimal non-faces generate the Stanley-Reisner ideal.
  std::vector<Poly> generators;
  std::vector<int> gen_degree;
  for (unsigned mask = 1; mask < (1u << c); ++mask) {
    std::vector<int> set;
    for (int j = 0; j < c; ++j)
      if (mask & (1u << j)) set.push_back(j);
    if (set.size() < 2 || fan_.is_cone(set)) continue;
    bool minimal = true;
    for (std::size_t drop = 0; drop < set.size() && minimal; ++drop) {
      std::vector<int> sub;
      for (std::size_t i = 0; i < set.size(); ++i)
        if (i != drop) sub.push_back(set[i]);
      if (!fan_.is_cone(sub)) minimal = false;
    }
    if (!minimal) continue;
    Poly g;
    g[Exponent(r, 0)] = 1;
    for (int j : set) g = poly_mul(g, lin[j]);
    generators.push_back(std::move(g));
    gen_degree.push_back(static_cast<int>(set.size()));
  }

  // h-vector of the fan: dimension of H^{2k}.
  std::vector<long long> f(n + 1, 0);
  {
    std::vector<std::vector<int>> faces;
    for (const auto& sigma : fan_.max_cones) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> face;
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i)) face.push_back(sigma[i]);
        faces.push_back(face);
      }
    }
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
    for (const auto& face : faces) ++f[face.size()];
  }
  betti_.assign(n + 1, 0);
  for (int k = 0; k <= n; ++k) {
    long long h = 0;
    for (int i = 0; i <= k; ++i) h += ((k - i) % 2 ? -1 : 1) * binomial(n - i, k - i) * f[i];
    betti_[k] = static_cast<int>(h);
  }

  // Per-degree reduction data.
  struct Graded {
    std::vector<Exponent> monomials;
    std::map<Exponent, std::size_t> column;
    RationalMatrix rows;
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> standard;  // monomial columns that survive
  };
  std::vector<Graded> graded(n + 2);
  for (int k = 0; k <= n + 1; ++k) {
    Graded& g = graded[k];
    g.monomials = monomials_of_degree(r, k);
    for (std::size_t i = 0; i < g.monomials.size(); ++i) g.column[g.monomials[i]] = i;
    for (std::size_t gi = 0; gi < generators.size(); ++gi) {
      if (gen_degree[gi] > k) continue;
      for (const auto& mono : monomials_of_degree(r, k - gen_degree[gi])) {
        Poly shifted = poly_mul(generators[gi], Poly{{mono, Rational(1)}});
        std::vector<Rational> row(g.monomials.size());
        for (const auto& [e, coef] : shifted) row[g.column.at(e)] = coef;
        g.rows.push_back(std::move(row));
      }
    }
    g.pivots = rref(g.rows, g.monomials.size());
    for (std::size_t col = 0; col < g.monomials.size(); ++col)
      if (!std::binary_search(g.pivots.begin(), g.pivots.end(), col)) g.standard.push_back(col);
  }
  if (!graded[n + 1].standard.empty()) throw std::logic_error("cohomology does not vanish above the top degree");
  for (int k = 0; k <= n; ++k)
    if (static_cast<int>(graded[k].standard.size()) != betti_[k])
      throw std::logic_error("graded dimension disagrees with the h-vector in degree " + std::to_string(k));

  offset_.assign(n + 2, 0);
  for (int k = 0; k <= n; ++k) {
    offset_[k + 1] = offset_[k] + graded[k].standard.size();
    for (std::size_t col : graded[k].standard) {
      degree_.push_back(k);
      const Exponent& e = graded[k].monomials[col];
      std::ostringstream os;
      bool first = true;
      for (int v = 0; v < r; ++v) {
        if (e[v] == 0) continue;
        if (!first) os << '*';
        os << 'D' << free_rays_[v];
        if (e[v] > 1) os << '^' << e[v];
        first = false;
      }
      labels_.push_back(first ? "1" : os.str());
    }
  }
  if (degree_count(n) != 1) throw std::logic_error("top cohomology is not one-dimensional");

  auto normal_form = [&](const Poly& p, int k) {
    std::vector<Rational> out(size());
    if (k > n) return out;
    const Graded& g = graded[k];
    std::vector<Rational> v(g.monomials.size());
    for (const auto& [e, coef] : p) v[g.column.at(e)] += coef;
    for (std::size_t row = 0; row < g.rows.size(); ++row) {
      const Rational f = v[g.pivots[row]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < v.size(); ++j)
        if (g.rows[row][j] != 0) v[j] -= f * g.rows[row][j];
    }
    for (std::size_t s = 0; s < g.standard.size(); ++s) out[offset_[k] + s] = v[g.standard[s]];
    return out;
  };

  const std::size_t m = size();
  mult_.assign(m * m * m, Rational(0));
  mult_d_.assign(m * m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const int k = degree_[i] + degree_[j];
      if (k > n) continue;
      const Exponent& ei = graded[degree_[i]].monomials[graded[degree_[i]].standard[i - offset_[degree_[i]]]];
      const Exponent& ej = graded[degree_[j]].monomials[graded[degree_[j]].standard[j - offset_[degree_[j]]]];
      Exponent e(r);
      for (int v = 0; v < r; ++v) e[v] = ei[v] + ej[v];
      auto prod = normal_form(Poly{{e, Rational(1)}}, k);
      for (std::size_t t = 0; t < m; ++t) {
        if (prod[t] == 0) continue;
        mult_[(i * m + j) * m + t] = prod[t];
        mult_d_[(i * m + j) * m + t] = to_double(prod[t]);
        products_.push_back({i, j, t, prod[t], to_double(prod[t])});
      }
    }
  }

  divisors_.resize(c);
  c1_.assign(m, Rational(0));
  for (int j = 0; j < c; ++j) {
    divisors_[j] = normal_form(lin[j], 1);
    for (std::size_t t = 0; t < m; ++t) c1_[t] += divisors_[j][t];
  }

  Poly point;
  point[Exponent(r, 0)] = 1;
  for (int i : sigma0) point = poly_mul(point, lin[i]);
  const auto pt = normal_form(point, n);
  if (pt[top_index()] == 0) throw std::logic_error("reference cone does not give a point class");
  top_integral_ = 1 / pt[top_index()];

  for (const auto& sigma : fan_.max_cones) {
    std::vector<Rational> acc = unit();
    for (int i : sigma) acc = multiply(acc, divisors_[i]);
    if (integrate(acc) != 1) throw std::logic_error("maximal cone does not integrate to one");
  }
}

/// Exact value of the integral of D_{i_1} ... D_{i_n}.
inline Rational intersection_number(const CohRing& ring, const std::vector<int>& divisor_indices) {
  if (static_cast<int>(divisor_indices.size()) != ring.dim())
    throw std::invalid_argument("intersection_number needs exactly dim divisors, got " +
                                std::to_string(divisor_indices.size()));
  std::vector<Rational> acc = ring.unit();
  for (int j : divisor_indices) {
    if (j < 0 || j >= ring.fan().num_rays()) throw std::invalid_argument("divisor index out of range");
    acc = ring.multiply(acc, ring.divisor(j));
  }
  return ring.integrate(acc);
}

/// Exact value of the integral of exp(sum_j lambda_j D_j).
inline Rational dh_pairing(const CohRing& ring, const std::vector<Rational>& lambda) {
  if (static_cast<int>(lambda.size()) != ring.fan().num_rays())
    throw std::invalid_argument("dh_pairing: lambda must have one entry per ray");
  std::vector<Rational> omega(ring.size());
  for (int j = 0; j < ring.fan().num_rays(); ++j)
    for (std::size_t t = 0; t < ring.size(); ++t) omega[t] += lambda[j] * ring.divisor(j)[t];
  std::vector<Rational> power = ring.unit();
  BigInt factorial = 1;
  for (int k = 1; k <= ring.dim(); ++k) {
    power = ring.multiply(power, omega);
    factorial *= k;
  }
  return ring.integrate(power) / Rational(factorial);
}

}  // namespace mirrorgamma
