#pragma once

// Exact checks of the two standing assumptions on a mirror Laurent polynomial:
// the origin is an interior point of the Newton polytope, and all coefficients are positive.

#include <optional>
#include <string>
#include <vector>

#include "mirrorgamma/detail/exact_linalg.hpp"
#include "mirrorgamma/mirror/laurent.hpp"
#include "mirrorgamma/rational.hpp"

namespace mirrorgamma {

namespace detail {

struct LpSolution {
  std::vector<Rational> x;
  Rational objective;
};

// Maximize c.x subject to A x = b, x >= 0, by the two-phase tableau method with Bland's rule.
// Returns nullopt when infeasible; throws on an unbounded objective.
inline std::optional<LpSolution> simplex_max(RationalMatrix A, std::vector<Rational> b, const std::vector<Rational>& c) {
  const std::size_t rows = A.size();
  const std::size_t vars = c.size();
  for (std::size_t r = 0; r < rows; ++r)
    if (b[r] < 0) {
      for (auto& v : A[r]) v = -v;
      b[r] = -b[r];
    }
  // Columns: original vars, one artificial per row, right-hand side.
  const std::size_t cols = vars + rows;
  RationalMatrix T(rows, std::vector<Rational>(cols + 1, Rational(0)));
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < vars; ++j) T[r][j] = A[r][j];
    T[r][vars + r] = 1;
    T[r][cols] = b[r];
    basis[r] = vars + r;
  }

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    const Rational p = T[pr][pc];
    for (auto& v : T[pr]) v /= p;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pr || T[r][pc] == 0) continue;
      const Rational f = T[r][pc];
      for (std::size_t j = 0; j <= cols; ++j) T[r][j] -= f * T[pr][j];
    }
    basis[pr] = pc;
  };

  // Reduced costs of objective `cost` over the allowed columns; returns false if unbounded.
  auto optimize = [&](const std::vector<Rational>& cost, std::size_t allowed) {
    while (true) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < allowed && !enter; ++j) {
        Rational reduced = cost[j];
        for (std::size_t r = 0; r < rows; ++r) reduced -= cost[basis[r]] * T[r][j];
        if (reduced > 0) enter = j;
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t r = 0; r < rows; ++r) {
        if (T[r][*enter] <= 0) continue;
        const Rational ratio = T[r][cols] / T[r][*enter];
        if (!leave || ratio < best || (ratio == best && basis[r] < basis[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  };

  std::vector<Rational> phase1(cols, Rational(0));
  for (std::size_t r = 0; r < rows; ++r) phase1[vars + r] = -1;
  optimize(phase1, cols);
  Rational infeasibility = 0;
  for (std::size_t r = 0; r < rows; ++r)
    if (basis[r] >= vars) infeasibility += T[r][cols];
  if (infeasibility != 0) return std::nullopt;
  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] < vars) continue;
    for (std::size_t j = 0; j < vars; ++j)
      if (T[r][j] != 0) {
        pivot(r, j);
        break;
      }
  }
  std::vector<Rational> cost(cols, Rational(0));
  for (std::size_t j = 0; j < vars; ++j) cost[j] = c[j];
  if (!optimize(cost, vars)) throw std::runtime_error("linear program is unbounded");

  LpSolution out{std::vector<Rational>(vars, Rational(0)), Rational(0)};
  for (std::size_t r = 0; r < rows; ++r)
    if (basis[r] < vars) out.x[basis[r]] = T[r][cols];
  for (std::size_t j = 0; j < vars; ++j) out.objective += c[j] * out.x[j];
  return out;
}

}  // namespace detail

struct AssumptionReport {
  bool origin_interior = false;     // W1
  bool positive_coefficients = false;  // W2
  std::vector<Rational> weights;    // strictly positive convex weights with sum_j w_j b_j = 0 when W1 holds
  std::string message;

  bool ok() const { return origin_interior && positive_coefficients; }
};

/// W1 via the linear program  max eps  s.t.  sum_j w_j b_j = 0, sum_j w_j = 1, w_j >= eps,
/// together with a rank check (the exponents must span R^n).  W2 by a sign scan.
inline AssumptionReport check_assumptions(const LaurentPoly& W) {
  AssumptionReport rep;
  const int n = W.dim();
  const std::size_t m = W.terms().size();

  rep.positive_coefficients = !W.empty();
  for (const auto& t : W.terms())
    if (!(t.coeff > 0.0)) rep.positive_coefficients = false;

  bool spans = false;
  if (m > 0) {
    detail::RationalMatrix E(m, std::vector<Rational>(n));
    for (std::size_t j = 0; j < m; ++j)
      for (int a = 0; a < n; ++a) E[j][a] = W.terms()[j].exponent[a];
    spans = detail::rank(E, n) == static_cast<std::size_t>(n);
  }

  bool strictly_positive = false;
  if (m > 0) {
    // Variables mu_j = w_j - eps >= 0 and eps >= 0.
    detail::RationalMatrix A(n + 1, std::vector<Rational>(m + 1, Rational(0)));
    std::vector<Rational> b(n + 1, Rational(0));
    for (std::size_t j = 0; j < m; ++j) {
      for (int a = 0; a < n; ++a) {
        A[a][j] = W.terms()[j].exponent[a];
        A[a][m] += W.terms()[j].exponent[a];
      }
      A[n][j] = 1;
    }
    A[n][m] = static_cast<long long>(m);
    b[n] = 1;
    std::vector<Rational> c(m + 1, Rational(0));
    c[m] = 1;
    if (auto sol = detail::simplex_max(A, b, c); sol && sol->objective > 0) {
      strictly_positive = true;
      for (std::size_t j = 0; j < m; ++j) rep.weights.push_back(sol->x[j] + sol->x[m]);
    }
  }
  rep.origin_interior = spans && strictly_positive;

  if (!rep.positive_coefficients) rep.message += "W2 fails: a coefficient is not positive. ";
  if (!spans) rep.message += "W1 fails: exponents do not span the lattice. ";
  else if (!strictly_positive) rep.message += "W1 fails: origin is not interior to the Newton polytope. ";
  if (rep.ok()) rep.message = "ok";
  return rep;
}

}  // namespace mirrorgamma
