#pragma once

// Fan data for smooth complete toric Fano varieties, with the JSON fan-file reader.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mirrorgamma/detail/exact_linalg.hpp"
#include "mirrorgamma/rational.hpp"

namespace mirrorgamma {

enum class FanErrorKind { Malformed, NonPrimitiveRay, SingularCone, NotComplete, NotFano };

inline const char* to_string(FanErrorKind k) {
  switch (k) {
    case FanErrorKind::Malformed: return "malformed fan file";
    case FanErrorKind::NonPrimitiveRay: return "non-primitive ray";
    case FanErrorKind::SingularCone: return "singular cone";
    case FanErrorKind::NotComplete: return "fan is not complete";
    case FanErrorKind::NotFano: return "not a Fano configuration";
  }
  return "fan error";
}

class FanError : public std::runtime_error {
 public:
  FanError(FanErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
  FanErrorKind kind() const noexcept { return kind_; }

 private:
  FanErrorKind kind_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using IntVector = std::vector<int>;

/// Ray generators b_j and maximal cones of a smooth complete fan whose rays are the
/// vertices of a polytope containing the origin in its interior.
struct FanData {
  std::string name;
  int dim = 0;
  std::vector<IntVector> rays;
  std::vector<std::vector<int>> max_cones;  // each sorted ascending

  int num_rays() const { return static_cast<int>(rays.size()); }

  /// True when the index set spans a cone of the fan (is contained in a maximal cone).
  bool is_cone(const std::vector<int>& sorted_indices) const {
    return std::any_of(max_cones.begin(), max_cones.end(), [&](const std::vector<int>& sigma) {
      return std::includes(sigma.begin(), sigma.end(), sorted_indices.begin(), sorted_indices.end());
    });
  }

  /// Column matrix of the rays of a cone (n x n).
  detail::RationalMatrix cone_matrix(const std::vector<int>& sigma) const {
    detail::RationalMatrix m(dim, std::vector<Rational>(sigma.size()));
    for (std::size_t c = 0; c < sigma.size(); ++c)
      for (int r = 0; r < dim; ++r) m[r][c] = rays[sigma[c]][r];
    return m;
  }
};

namespace detail {

inline long long dot(const IntVector& a, const IntVector& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i];
  return s;
}

// Side of the hyperplane spanned by `facet` (n-1 rays) on which `v` lies: sign of det[facet | v].
inline int side_of(const FanData& fan, const std::vector<int>& facet, const IntVector& v) {
  RationalMatrix m(fan.dim, std::vector<Rational>(fan.dim));
  for (std::size_t c = 0; c < facet.size(); ++c)
    for (int r = 0; r < fan.dim; ++r) m[r][c] = fan.rays[facet[c]][r];
  for (int r = 0; r < fan.dim; ++r) m[r][fan.dim - 1] = v[r];
  const Rational d = determinant(std::move(m));
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

inline void validate_fan(const FanData& fan) {
  const int n = fan.dim;
  const int c = fan.num_rays();
  if (n < 1) throw FanError(FanErrorKind::Malformed, "dimension must be positive");
  if (c < n + 1) throw FanError(FanErrorKind::Malformed, "a complete fan needs at least dim+1 rays");
  for (int j = 0; j < c; ++j) {
    if (static_cast<int>(fan.rays[j].size()) != n)
      throw FanError(FanErrorKind::Malformed, "ray " + std::to_string(j) + " has wrong length");
    int g = 0;
    for (int x : fan.rays[j]) g = std::gcd(g, std::abs(x));
    if (g != 1) throw FanError(FanErrorKind::NonPrimitiveRay, "ray " + std::to_string(j) + " has gcd " + std::to_string(g));
    for (int k = 0; k < j; ++k)
      if (fan.rays[k] == fan.rays[j]) throw FanError(FanErrorKind::Malformed, "duplicate ray " + std::to_string(j));
  }
  if (fan.max_cones.empty()) throw FanError(FanErrorKind::Malformed, "no maximal cones");
  std::vector<bool> used(c, false);
  for (std::size_t s = 0; s < fan.max_cones.size(); ++s) {
    const auto& sigma = fan.max_cones[s];
    if (static_cast<int>(sigma.size()) != n)
      throw FanError(FanErrorKind::Malformed, "cone " + std::to_string(s) + " does not have dim rays");
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (sigma[i] < 0 || sigma[i] >= c)
        throw FanError(FanErrorKind::Malformed, "cone " + std::to_string(s) + " references unknown ray");
      if (i > 0 && sigma[i] == sigma[i - 1])
        throw FanError(FanErrorKind::Malformed, "cone " + std::to_string(s) + " repeats a ray");
      used[sigma[i]] = true;
    }
    for (std::size_t t = 0; t < s; ++t)
      if (fan.max_cones[t] == sigma) throw FanError(FanErrorKind::Malformed, "duplicate cone " + std::to_string(s));
    const Rational det = determinant(fan.cone_matrix(sigma));
    if (det != 1 && det != -1)
      throw FanError(FanErrorKind::SingularCone, "cone " + std::to_string(s) + " has determinant " + det.str());
  }
  for (int j = 0; j < c; ++j)
    if (!used[j]) throw FanError(FanErrorKind::NotComplete, "ray " + std::to_string(j) + " lies in no maximal cone");

  // Pseudo-manifold with consistent sides: every facet of a maximal cone is shared by exactly
  // one other maximal cone lying on the opposite side of the facet hyperplane.
  for (std::size_t s = 0; s < fan.max_cones.size(); ++s) {
    const auto& sigma = fan.max_cones[s];
    for (int drop = 0; drop < n; ++drop) {
      std::vector<int> facet;
      for (int i = 0; i < n; ++i)
        if (i != drop) facet.push_back(sigma[i]);
      int neighbours = 0;
      std::size_t other = 0;
      for (std::size_t t = 0; t < fan.max_cones.size(); ++t) {
        if (t == s) continue;
        const auto& tau = fan.max_cones[t];
        if (std::includes(tau.begin(), tau.end(), facet.begin(), facet.end())) {
          ++neighbours;
          other = t;
        }
      }
      if (neighbours != 1)
        throw FanError(FanErrorKind::NotComplete,
                       "a facet of cone " + std::to_string(s) + " lies in " + std::to_string(neighbours) + " other cones");
      int apex_other = -1;
      for (int r : fan.max_cones[other])
        if (std::find(facet.begin(), facet.end(), r) == facet.end()) apex_other = r;
      if (n > 1) {
        const int a = side_of(fan, facet, fan.rays[sigma[drop]]);
        const int b = side_of(fan, facet, fan.rays[apex_other]);
        if (a * b != -1)
          throw FanError(FanErrorKind::NotComplete, "cones " + std::to_string(s) + " and " + std::to_string(other) + " overlap");
      } else if (fan.rays[sigma[drop]][0] * fan.rays[apex_other][0] >= 0) {
        throw FanError(FanErrorKind::NotComplete, "one-dimensional cones overlap");
      }
    }
  }
  // Covering degree one at a generic point.
  std::vector<Rational> probe(n);
  for (int i = 0; i < n; ++i) probe[i] = Rational(1000003 + 7919 * i * i, 1000 + 17 * i) * (i % 2 == 0 ? 1 : -1);
  int covering = 0;
  for (const auto& sigma : fan.max_cones) {
    auto coords = solve(fan.cone_matrix(sigma), probe);
    if (coords && std::all_of(coords->begin(), coords->end(), [](const Rational& q) { return q >= 0; })) ++covering;
  }
  if (covering != 1) throw FanError(FanErrorKind::NotComplete, "cones cover a generic point " + std::to_string(covering) + " times");

  // Fano: the piecewise-linear function equal to 1 on every ray is strictly convex, i.e. for
  // each maximal cone the dual vector m with <m,b_i> = 1 (i in sigma) has <m,b_j> < 1 elsewhere.
  for (std::size_t s = 0; s < fan.max_cones.size(); ++s) {
    const auto& sigma = fan.max_cones[s];
    RationalMatrix bt(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) bt[i][k] = fan.rays[sigma[i]][k];
    auto m = solve(bt, std::vector<Rational>(n, Rational(1)));
    for (int j = 0; j < c; ++j) {
      if (std::binary_search(sigma.begin(), sigma.end(), j)) continue;
      Rational v = 0;
      for (int k = 0; k < n; ++k) v += (*m)[k] * fan.rays[j][k];
      if (v >= 1)
        throw FanError(FanErrorKind::NotFano, "ray " + std::to_string(j) + " is not a vertex beyond cone " + std::to_string(s));
    }
  }
}

}  // namespace detail

/// Builds and validates fan data; cone index lists are sorted on the way in.
inline FanData make_fan(std::vector<IntVector> rays, std::vector<std::vector<int>> cones, std::string name = {}) {
  FanData fan;
  fan.name = std::move(name);
  fan.dim = rays.empty() ? 0 : static_cast<int>(rays.front().size());
  fan.rays = std::move(rays);
  for (auto& c : cones) std::sort(c.begin(), c.end());
  fan.max_cones = std::move(cones);
  detail::validate_fan(fan);
  return fan;
}

/// Parses the JSON fan format: {"name": ..., "rays": [[...], ...], "max_cones": [[...], ...]}.
inline FanData parse_fan(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FanError(FanErrorKind::Malformed, e.what());
  }
  if (!doc.is_object() || !doc.contains("rays") || !doc.contains("max_cones"))
    throw FanError(FanErrorKind::Malformed, "expected an object with \"rays\" and \"max_cones\"");
  std::vector<IntVector> rays;
  std::vector<std::vector<int>> cones;
  try {
    rays = doc.at("rays").get<std::vector<IntVector>>();
    cones = doc.at("max_cones").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw FanError(FanErrorKind::Malformed, e.what());
  }
  if (rays.empty()) throw FanError(FanErrorKind::Malformed, "no rays");
  std::string name = doc.value("name", std::string{});
  return make_fan(std::move(rays), std::move(cones), std::move(name));
}

inline FanData load_fan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read fan file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  FanData fan = parse_fan(buf.str());
  if (fan.name.empty()) fan.name = path.stem().string();
  return fan;
}

inline std::string to_json(const FanData& fan) {
  nlohmann::ordered_json j;
  j["name"] = fan.name;
  j["rays"] = fan.rays;
  j["max_cones"] = fan.max_cones;
  return j.dump();
}

}  // namespace mirrorgamma
