#pragma once

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "mirrorgamma/detail/exact_linalg.hpp"
#include "mirrorgamma/toric/fan.hpp"

namespace mirrorgamma {

/// A curve class d recorded by its intersection numbers with the toric divisors.
struct CurveClass {
  std::vector<int> pairing;  // (D_1.d, ..., D_c.d)
  int degree = 0;            // c_1.d

  bool operator==(const CurveClass&) const = default;
};

namespace detail {

// Nonvanishing rule for the toric J-function summand: the divisors with D_j.d < 0 each
// contribute a factor D_j, so the summand survives only if they span a cone.
inline bool summand_nonzero(const FanData& fan, const std::vector<int>& pairing) {
  std::vector<int> negative;
  for (int j = 0; j < fan.num_rays(); ++j)
    if (pairing[j] < 0) negative.push_back(j);
  return negative.empty() || fan.is_cone(negative);
}

}  // namespace detail

/// All curve classes with 0 <= c_1.d <= max_degree whose J-function summand is nonzero,
/// sorted by degree and then lexicographically by pairing vector.
inline std::vector<CurveClass> enumerate_curve_classes(const FanData& fan, int max_degree) {
  std::vector<CurveClass> out;
  if (max_degree < 0) return out;
  const int n = fan.dim;
  const int c = fan.num_rays();
  const auto& sigma0 = fan.max_cones.front();
  std::vector<int> free;
  for (int j = 0; j < c; ++j)
    if (!std::binary_search(sigma0.begin(), sigma0.end(), j)) free.push_back(j);
  auto binv = detail::inverse(fan.cone_matrix(sigma0));
  // Integer inverse: the reference cone is unimodular.
  std::vector<std::vector<long long>> inv(n, std::vector<long long>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) inv[a][b] = (*binv)[a][b].convert_to<long long>();

  const int r = static_cast<int>(free.size());
  std::vector<int> k(r, -max_degree);
  std::vector<int> pairing(c);
  while (true) {
    // Dependent coordinates: sum_j k_j b_j = 0.
    std::vector<long long> rhs(n, 0);
    for (int v = 0; v < r; ++v)
      for (int a = 0; a < n; ++a) rhs[a] -= static_cast<long long>(k[v]) * fan.rays[free[v]][a];
    bool ok = true;
    long long degree = 0;
    for (int v = 0; v < r; ++v) {
      pairing[free[v]] = k[v];
      degree += k[v];
    }
    for (int p = 0; p < n && ok; ++p) {
      long long kp = 0;
      for (int a = 0; a < n; ++a) kp += inv[p][a] * rhs[a];
      if (std::llabs(kp) > max_degree) ok = false;
      pairing[sigma0[p]] = static_cast<int>(kp);
      degree += kp;
    }
    if (ok && degree >= 0 && degree <= max_degree && detail::summand_nonzero(fan, pairing))
      out.push_back({pairing, static_cast<int>(degree)});

    int pos = 0;
    while (pos < r && k[pos] == max_degree) k[pos++] = -max_degree;
    if (pos == r) break;
    ++k[pos];
  }
  std::sort(out.begin(), out.end(), [](const CurveClass& a, const CurveClass& b) {
    return a.degree != b.degree ? a.degree < b.degree : a.pairing < b.pairing;
  });
  return out;
}

}  // namespace mirrorgamma
