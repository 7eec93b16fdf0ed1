#pragma once

// Moment polytope P_lambda = { t : <t, b_j> <= lambda_j } with exact vertices and volume.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorgamma/detail/exact_linalg.hpp"
#include "mirrorgamma/rational.hpp"
#include "mirrorgamma/toric/fan.hpp"

namespace mirrorgamma {

class PolytopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MomentPolytope {
  std::vector<IntVector> normals;             // b_j
  std::vector<Rational> levels;               // lambda_j
  std::vector<std::vector<Rational>> vertices;  // one per maximal cone, same order as the fan
  Rational volume;
};

namespace detail {

inline Rational simplex_volume(const std::vector<const std::vector<Rational>*>& pts) {
  const std::size_t n = pts.size() - 1;
  RationalMatrix m(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) m[i][k] = (*pts[i + 1])[k] - (*pts[0])[k];
  Rational d = determinant(std::move(m));
  if (d < 0) d = -d;
  BigInt fact = 1;
  for (std::size_t k = 2; k <= n; ++k) fact *= k;
  return d / Rational(fact);
}

}  // namespace detail

/// Vertex enumeration at the maximal cones and a pulling triangulation of the face lattice.
/// Requires lambda in the ample cone: every vertex strictly satisfies the other inequalities.
inline MomentPolytope moment_polytope(const FanData& fan, const std::vector<Rational>& lambda) {
  const int n = fan.dim;
  const int c = fan.num_rays();
  if (static_cast<int>(lambda.size()) != c) throw std::invalid_argument("moment_polytope: one level per ray required");
  MomentPolytope P;
  P.normals = fan.rays;
  P.levels = lambda;
  for (const auto& sigma : fan.max_cones) {
    detail::RationalMatrix bt(n, std::vector<Rational>(n));
    std::vector<Rational> rhs(n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) bt[i][k] = fan.rays[sigma[i]][k];
      rhs[i] = lambda[sigma[i]];
    }
    auto v = detail::solve(bt, rhs);
    if (!v) throw PolytopeError("degenerate cone");
    for (int j = 0; j < c; ++j) {
      if (std::binary_search(sigma.begin(), sigma.end(), j)) continue;
      Rational val = 0;
      for (int k = 0; k < n; ++k) val += (*v)[k] * fan.rays[j][k];
      if (val >= lambda[j])
        throw PolytopeError("lambda is not ample: vertex of cone violates inequality " + std::to_string(j) +
                            " (degenerate or unbounded polytope)");
    }
    P.vertices.push_back(std::move(*v));
  }

  // Face of the polytope <-> cone tau of the fan; its vertices are the maximal cones containing tau.
  auto first_vertex = [&](const std::vector<int>& tau) -> std::size_t {
    for (std::size_t s = 0; s < fan.max_cones.size(); ++s) {
      const auto& sigma = fan.max_cones[s];
      if (std::includes(sigma.begin(), sigma.end(), tau.begin(), tau.end())) return s;
    }
    throw std::logic_error("face without vertices");
  };
  Rational volume = 0;
  std::vector<const std::vector<Rational>*> apexes;
  auto pull = [&](auto&& self, const std::vector<int>& tau) -> void {
    if (static_cast<int>(tau.size()) == n) {
      auto pts = apexes;
      pts.push_back(&P.vertices[first_vertex(tau)]);
      volume += detail::simplex_volume(pts);
      return;
    }
    const std::size_t v0 = first_vertex(tau);
    const auto& sigma0 = fan.max_cones[v0];
    apexes.push_back(&P.vertices[v0]);
    for (int j = 0; j < c; ++j) {
      if (std::binary_search(tau.begin(), tau.end(), j)) continue;
      std::vector<int> face = tau;
      face.insert(std::upper_bound(face.begin(), face.end(), j), j);
      if (!fan.is_cone(face)) continue;
      if (std::includes(sigma0.begin(), sigma0.end(), face.begin(), face.end())) continue;
      self(self, face);
    }
    apexes.pop_back();
  };
  pull(pull, {});
  P.volume = volume;
  return P;
}

}  // namespace mirrorgamma
