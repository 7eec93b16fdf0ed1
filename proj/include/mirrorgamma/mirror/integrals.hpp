#pragma once

// Integral sides of the Gamma identities over (R_{>0})^n, computed in t = log x.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mirrorgamma/mirror/assumptions.hpp"
#include "mirrorgamma/mirror/minimize.hpp"
#include "mirrorgamma/mirror/montecarlo.hpp"
#include "mirrorgamma/mirror/region.hpp"

namespace mirrorgamma {

enum class IntegralMethod { Quadrature, MonteCarlo };

inline const char* to_string(IntegralMethod m) { return m == IntegralMethod::Quadrature ? "quad" : "mc"; }

struct IntegralResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  IntegralMethod method = IntegralMethod::Quadrature;
  long long samples_or_nodes = 0;
  std::optional<std::uint64_t> seed;
  bool exact = false;  // value is exactly zero because the region is empty or a point
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegralOptions {
  double tol = 1e-10;
  std::optional<IntegralMethod> method;  // default: quadrature for n <= 3, Monte Carlo above
  std::uint64_t seed = 20240601;
  std::size_t mc_batches = 64;
  std::size_t mc_batch_size = 1 << 14;
  unsigned threads = 0;

  IntegralMethod resolve(int n) const { return method.value_or(n <= 3 ? IntegralMethod::Quadrature : IntegralMethod::MonteCarlo); }
};

/// Optional factor e^{-W0(e^t)/z} under the integral.
struct Weight {
  LaurentPoly W0;
  double z = 1.0;
};

namespace detail {

inline void require_assumptions(const LaurentPoly& W) {
  const auto rep = check_assumptions(W);
  if (!rep.ok()) throw std::invalid_argument("Laurent polynomial violates the standing assumptions: " + rep.message);
}

inline LaurentPoly sum_of(int n, const std::vector<const LaurentPoly*>& parts) {
  std::vector<LaurentTerm> terms;
  for (const auto* p : parts)
    if (p) terms.insert(terms.end(), p->terms().begin(), p->terms().end());
  return LaurentPoly(n, std::move(terms));
}

// Tail parameter for truncating e^{-u} at u = L: e^{-L} L^n stays below tol/10 and L >= 40.
inline double tail_parameter(double tol, int n) {
  double L = 40.0;
  while (std::exp(-L) * std::pow(L, n) > tol / 10.0) L += 5.0;
  return L;
}

// Cauchy draws centred at mu with per-axis scale; returns the log density.
inline double cauchy_sample(std::mt19937_64& rng, const Eigen::VectorXd& mu, const Eigen::VectorXd& scale, Eigen::VectorXd& t) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double logp = 0.0;
  for (int a = 0; a < mu.size(); ++a) {
    const double u = std::tan(std::numbers::pi * (U(rng) - 0.5));
    t[a] = mu[a] + scale[a] * u;
    logp += -std::log(std::numbers::pi * scale[a] * (1.0 + u * u));
  }
  return logp;
}

}  // namespace detail

/// int_{(R_{>0})^n} e^{-W/z} dx/x.  Quadrature over {W(e^t) <= T + zL}; Monte Carlo with a
/// Gaussian proposal of covariance z H^{-1} at the minimizer.
inline IntegralResult oscillatory_integral(const LaurentPoly& W, double z, const IntegralOptions& opt = {}) {
  if (!(z > 0.0)) throw std::invalid_argument("oscillatory_integral needs z > 0");
  detail::require_assumptions(W);
  const int n = W.dim();
  const auto m = minimize_log(W);
  const double T = m.T;
  IntegralResult out;
  out.method = opt.resolve(n);
  if (out.method == IntegralMethod::Quadrature) {
    const double L = detail::tail_parameter(opt.tol, n);
    ConvexRegion region({{W, T + z * L}}, n);
    const auto r = region.integrate([&](const double* t) { return std::exp(-(W(t) - T) / z); }, opt.tol);
    const double scale = std::exp(-T / z);
    out.value = r.value * scale;
    out.error_estimate = (r.error + std::exp(-L) * std::pow(L, n) * std::abs(r.value)) * scale;
    out.samples_or_nodes = r.evaluations;
    return out;
  }
  const Eigen::MatrixXd cov = z * m.hessian.inverse();
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  const double log_norm = 0.5 * n * std::log(2.0 * std::numbers::pi) + std::log(chol.diagonal().prod());
  const auto est = monte_carlo(
      [&](std::mt19937_64& rng) {
        std::normal_distribution<double> N(0.0, 1.0);
        Eigen::VectorXd xi(n);
        for (int a = 0; a < n; ++a) xi[a] = N(rng);
        const Eigen::VectorXd t = m.argmin_log + chol * xi;
        const double logp = -0.5 * xi.squaredNorm() - log_norm;
        return std::exp(-(W(t) - T) / z - logp);
      },
      opt.seed, opt.mc_batches, opt.mc_batch_size, opt.threads);
  const double scale = std::exp(-T / z);
  out.value = est.mean * scale;
  out.error_estimate = est.standard_error * scale;
  out.samples_or_nodes = static_cast<long long>(est.samples);
  out.seed = opt.seed;
  return out;
}

/// z^c int e^{-W0/z} / prod_i (W_i - s_i) dx/x with every s_i off [0, inf).  Quadrature on the
/// exhaustion {W <= R} with R growing by 10^2 until successive values agree to tol/10.
inline IntegralResult multi_hilbert_integral(const LaurentPoly& W0, const std::vector<LaurentPoly>& Ws,
                                             const std::vector<std::complex<double>>& s, double z,
                                             const IntegralOptions& opt = {}) {
  if (Ws.size() != s.size()) throw std::invalid_argument("one s_i per factor is required");
  if (!(z > 0.0)) throw std::invalid_argument("multi_hilbert_integral needs z > 0");
  const int n = Ws.empty() ? W0.dim() : Ws.front().dim();
  std::vector<const LaurentPoly*> parts{&W0};
  for (const auto& w : Ws) parts.push_back(&w);
  const LaurentPoly W = detail::sum_of(n, parts);
  detail::require_assumptions(W);
  const auto m = minimize_log(W);
  for (std::size_t i = 0; i < s.size(); ++i) {
    // The cut of 1/(W_i - s_i) is the range of W_i: [T_i, inf) when W_i alone satisfies the
    // assumptions, otherwise it reaches down to 0.
    if (s[i].imag() != 0.0 || s[i].real() <= 0.0) continue;
    const double inf = check_assumptions(Ws[i]).ok() ? minimize_log(Ws[i]).T : 0.0;
    if (s[i].real() >= inf * (1.0 - 1e-8)) throw std::domain_error("s lies on or too near the cut of 1/(W - s)");
  }
  const double zc = std::pow(z, static_cast<double>(Ws.size()));
  auto integrand = [&](const double* t) {
    std::complex<double> den = 1.0;
    for (std::size_t i = 0; i < Ws.size(); ++i) den *= Ws[i](t) - s[i];
    const double w = W0.empty() ? 1.0 : std::exp(-W0(t) / z);
    return w / den;
  };
  bool complex_valued = false;
  for (const auto& si : s) complex_valued = complex_valued || si.imag() != 0.0;

  IntegralResult out;
  out.method = opt.resolve(n);
  if (out.method == IntegralMethod::Quadrature) {
    double scale = std::max(1.0, m.T);
    for (const auto& si : s) scale = std::max(scale, std::abs(si));
    std::complex<double> previous;
    long long nodes = 0;
    for (int k = 0; k < 8; ++k) {
      const double R = scale * std::pow(10.0, 8 + 2 * k);
      ConvexRegion region({{W, R}}, n);
      const auto re = region.integrate([&](const double* t) { return integrand(t).real(); }, opt.tol);
      std::complex<double> v = re.value;
      nodes += re.evaluations;
      if (complex_valued) {
        const auto im = region.integrate([&](const double* t) { return integrand(t).imag(); }, opt.tol);
        v += std::complex<double>(0.0, im.value);
        nodes += im.evaluations;
      }
      v *= zc;
      if (k > 0 && std::abs(v - previous) <= opt.tol * std::max(1.0, std::abs(v)) / 10.0) {
        out.value = v;
        out.error_estimate = std::abs(v - previous);
        out.samples_or_nodes = nodes;
        return out;
      }
      previous = v;
    }
    throw IntegrationError("exhaustion did not converge to the requested tolerance");
  }
  // Heavy-tailed proposal: the integrand decays only like e^{-kappa |t|}.
  Eigen::VectorXd scale = m.hessian.inverse().diagonal().cwiseSqrt().cwiseMax(0.5);
  auto run = [&](bool imag_part) {
    return monte_carlo(
        [&](std::mt19937_64& rng) {
          Eigen::VectorXd t(n);
          const double logp = detail::cauchy_sample(rng, m.argmin_log, scale, t);
          const auto v = integrand(t.data());
          return (imag_part ? v.imag() : v.real()) * std::exp(-logp);
        },
        opt.seed, opt.mc_batches, opt.mc_batch_size, opt.threads);
  };
  const auto re = run(false);
  out.value = re.mean * zc;
  double var = re.standard_error * re.standard_error;
  out.samples_or_nodes = static_cast<long long>(re.samples);
  if (complex_valued) {
    const auto im = run(true);
    out.value += std::complex<double>(0.0, im.mean * zc);
    var += im.standard_error * im.standard_error;
  }
  out.error_estimate = std::sqrt(var) * zc;
  out.seed = opt.seed;
  return out;
}

/// int (W - s)^{-1} dx/x for s off the cut [T, inf).
inline IntegralResult hilbert_integral(const LaurentPoly& W, std::complex<double> s, const IntegralOptions& opt = {}) {
  detail::require_assumptions(W);
  const double T = minimize_log(W).T;
  const double dist = s.real() >= T ? std::abs(s.imag()) : std::abs(s - std::complex<double>(T, 0.0));
  if (dist < 1e-8 * T) throw std::domain_error("s lies on or too near the cut [T, inf)");
  return multi_hilbert_integral(LaurentPoly(W.dim(), {}), {W}, {s}, 1.0, opt);
}

namespace detail {

// Region integral with an explicit weight reference and cut, shared by the finite-difference
// stencil so that all stencil points see the same truncation.
struct WeightCut {
  double reference = 0.0;  // integrand is e^{-(W0 - reference)/z}, rescaled by e^{-reference/z}
  double cut = 0.0;        // W0 <= cut
};

inline IntegralResult region_volume_with(const std::vector<LaurentPoly>& Ws, const std::vector<double>& s,
                                         const std::optional<Weight>& weight, const std::optional<WeightCut>& wc,
                                         const IntegralOptions& opt) {
  if (Ws.size() != s.size() || Ws.empty()) throw std::invalid_argument("one level s_i per polynomial is required");
  const int n = Ws.front().dim();
  for (double si : s)
    if (!(si > 0.0)) throw std::domain_error("region_volume needs s_i > 0");
  std::vector<Constraint> cs;
  for (std::size_t i = 0; i < Ws.size(); ++i) cs.push_back({Ws[i], s[i]});
  if (weight && wc) cs.push_back({weight->W0, wc->cut});

  IntegralResult out;
  out.method = opt.resolve(n);
  const auto region = std::make_unique<ConvexRegion>(cs, n);
  if (!(region->minimum().first < 0.0)) {
    out.exact = true;
    return out;
  }
  auto f = [&](const double* t) { return weight ? std::exp(-(weight->W0(t) - wc->reference) / weight->z) : 1.0; };
  const double rescale = weight ? std::exp(-wc->reference / weight->z) : 1.0;
  if (out.method == IntegralMethod::Quadrature) {
    const auto r = region->integrate(f, opt.tol);
    out.value = r.value * rescale;
    out.error_estimate = r.error * rescale;
    out.samples_or_nodes = r.evaluations;
    out.exact = r.empty;
    return out;
  }
  const auto& lo = region->lower();
  const auto& hi = region->upper();
  double box = 1.0;
  for (int a = 0; a < n; ++a) box *= hi[a] - lo[a];
  const auto est = monte_carlo(
      [&](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::vector<double> t(n);
        for (int a = 0; a < n; ++a) t[a] = lo[a] + (hi[a] - lo[a]) * U(rng);
        return region->G(t.data()) <= 0.0 ? f(t.data()) : 0.0;
      },
      opt.seed, opt.mc_batches, opt.mc_batch_size, opt.threads);
  out.value = est.mean * box * rescale;
  out.error_estimate = est.standard_error * box * rescale;
  out.samples_or_nodes = static_cast<long long>(est.samples);
  out.seed = opt.seed;
  return out;
}

// Reference and cut for the weight.  The reference is W0 at a feasible point: the minimizer of
// the full W when it lies in the region (always the case for large s), otherwise the point that
// minimizes the largest constraint excess.
inline WeightCut weight_cut(const std::vector<LaurentPoly>& Ws, const std::vector<double>& s, const Weight& w, double tol) {
  const int n = Ws.front().dim();
  std::vector<const LaurentPoly*> parts{&w.W0};
  for (const auto& p : Ws) parts.push_back(&p);
  const LaurentPoly W = sum_of(n, parts);
  require_assumptions(W);
  const auto m = minimize_log(W);
  double ref = w.W0(m.argmin_log);
  bool inside = true;
  for (std::size_t i = 0; i < Ws.size(); ++i) inside = inside && Ws[i](m.argmin_log) <= s[i];
  if (!inside) {
    std::vector<Constraint> cs;
    for (std::size_t i = 0; i < Ws.size(); ++i) cs.push_back({Ws[i], s[i]});
    cs.push_back({w.W0, (ref + 1.0) * 1e3});  // loose bound that only makes the box finite
    const auto [g, t] = ConvexRegion(cs, n).minimum();
    ref = w.W0(t.data());
  }
  return {ref, ref + w.z * (tail_parameter(tol, n) + 10.0)};
}

}  // namespace detail

/// int_B weight dt over B = {t : W_i(e^t) <= s_i for all i}.
inline IntegralResult region_volume(const std::vector<LaurentPoly>& Ws, const std::vector<double>& s,
                                    const std::optional<Weight>& weight = std::nullopt, const IntegralOptions& opt = {}) {
  if (Ws.empty()) throw std::invalid_argument("region_volume needs at least one polynomial");
  std::optional<detail::WeightCut> wc;
  if (weight) {
    if (weight->W0.empty()) return region_volume(Ws, s, std::nullopt, opt);
    wc = detail::weight_cut(Ws, s, *weight, opt.tol);
  }
  return detail::region_volume_with(Ws, s, weight, wc, opt);
}

/// int_{C_s} weight dlog x / (dW_1 ... dW_c) as the mixed derivative of region_volume in s,
/// by central differences with h_i = 1e-3 s_i and one Richardson step.
inline IntegralResult fiber_integral(const std::vector<LaurentPoly>& Ws, const std::vector<double>& s,
                                     const std::optional<Weight>& weight = std::nullopt, const IntegralOptions& opt = {}) {
  const std::size_t c = Ws.size();
  if (c == 0 || s.size() != c) throw std::invalid_argument("one level s_i per polynomial is required");
  std::optional<Weight> w = weight;
  if (w && w->W0.empty()) w.reset();
  std::optional<detail::WeightCut> wc;
  if (w) {
    std::vector<double> top(s);
    for (auto& x : top) x *= 1.0 + 2e-3;
    wc = detail::weight_cut(Ws, top, *w, opt.tol);
  }
  IntegralOptions inner = opt;
  inner.tol = std::min(opt.tol, 1e-12);
  long long nodes = 0;
  double propagated = 0.0;
  auto difference = [&](double rel) {
    std::complex<double> sum = 0.0;
    double h_prod = 1.0;
    for (std::size_t i = 0; i < c; ++i) h_prod *= 2.0 * rel * s[i];
    for (std::size_t mask = 0; mask < (std::size_t(1) << c); ++mask) {
      std::vector<double> at(s);
      int sign = 1;
      for (std::size_t i = 0; i < c; ++i) {
        const bool up = (mask >> i) & 1;
        at[i] += (up ? 1.0 : -1.0) * rel * s[i];
        if (!up) sign = -sign;
      }
      const auto r = detail::region_volume_with(Ws, at, w, wc, inner);
      nodes += r.samples_or_nodes;
      propagated += r.error_estimate / h_prod;
      sum += static_cast<double>(sign) * r.value;
    }
    return sum / h_prod;
  };
  const auto D1 = difference(1e-3);
  const auto D2 = difference(5e-4);
  const auto R = (4.0 * D2 - D1) / 3.0;
  IntegralResult out;
  out.method = opt.resolve(Ws.front().dim());
  out.value = R;
  out.error_estimate = std::abs(R - D2) + propagated;
  out.samples_or_nodes = nodes;
  if (out.method == IntegralMethod::MonteCarlo) out.seed = opt.seed;
  // Second differences much larger than first-order behaviour signal a degenerate fiber.
  if (out.method == IntegralMethod::Quadrature && std::abs(R - D2) > 1e-2 * std::abs(R))
    throw IntegrationError("fiber integral unstable under step refinement; s is not generic");
  return out;
}

}  // namespace mirrorgamma
