// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "mirrorgamma/mirrorgamma.hpp"

using namespace mirrorgamma;

namespace {

const std::vector<std::string> kFixtures = {"p1", "p2", "p1xp1", "bl1p2", "p3"};
const Complex kTwoPiI(0.0, 2.0 * std::numbers::pi);

std::string fixture(const std::string& name) { return std::string(MIRRORGAMMA_FIXTURE_DIR) + "/" + name + ".fan"; }

std::string sci(double x) {
  std::ostringstream o;
  o << std::scientific << std::setprecision(2) << x;
  return o.str();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
  std::vector<std::string> info;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("failed: " + what);
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

CheckSpec spec(CheckKind kind, const std::string& fan) {
  CheckSpec s = default_spec(kind);
  s.fan = fixture(fan);
  return s;
}

/// Runs a check and folds its verdict into the outcome.
CheckReport expect_pass(Outcome& out, const CheckSpec& s) {
  const auto r = run_check(s);
  std::string what = r.check + " " + r.fixture;
  for (const auto& d : r.diagnostics) what += "; " + d;
  out.require(r.pass, what);
  out.details.push_back(r.check + " " + r.fixture + " worst rel_err " + sci(r.worst_rel_err()));
  return r;
}

// 1. Exact DH pairing against the exact polytope volume on random ample rational lambda.
void dh_exactness(Outcome& out) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> step(-6, 6);
  int checked = 0;
  for (const auto& name : kFixtures) {
    const auto fan = load_fan(fixture(name));
    const auto ring = CohRing::build(fan);
    int accepted = 0;
    while (accepted < 3) {
      std::vector<Rational> lambda(fan.num_rays());
      for (auto& l : lambda) l = Rational(1) + Rational(step(rng), 24);
      Rational volume;
      try {
        volume = moment_polytope(fan, lambda).volume;
      } catch (const PolytopeError&) {
        continue;  // not ample; draw again
      }
      ++accepted;
      ++checked;
      const Rational dh = dh_pairing(*ring, lambda);
      out.require(dh == volume, name + ": dh " + dh.str() + " vs volume " + volume.str());
    }
  }
  out.details.push_back(std::to_string(checked) + " exact rational equalities");
}

// 2. ms-gamma identity on P1 (N = 20) and P2 (N = 12).
void ms_gamma(Outcome& out) {
  auto p1 = spec(CheckKind::MsGamma, "p1");
  p1.z = {0.5, 1.0, 2.0};
  p1.degree = 20;
  p1.tol = 1e-5;
  const auto r1 = expect_pass(out, p1);
  const double oracle = 2.0 * boost::math::cyl_bessel_k(0, 2.0);
  const double lhs = r1.points.at(1).lhs.real();
  out.require(std::abs(lhs - oracle) < 1e-6, "P1 lhs at z = 1 vs 2 K_0(2)");
  out.details.push_back("P1 lhs(z=1) - 2K_0(2) = " + sci(lhs - oracle));

  auto p2 = spec(CheckKind::MsGamma, "p2");
  p2.z = {0.5, 1.0, 2.0};
  p2.degree = 12;
  p2.tol = 1e-5;
  const auto r2 = expect_pass(out, p2);
  for (const auto& p : r2.points)
    for (const auto& n : p.notes) out.info.push_back("P2 z = " + std::to_string(p.params[0].second).substr(0, 3) + ": " + n);
  // The literal truncation N = 12 (c1.d <= 12) for comparison; not part of the verdict.
  p2.extend_truncation = false;
  const auto literal = run_check(p2);
  std::string line = "P2 at the literal N = 12 without extension:";
  for (const auto& p : literal.points)
    line += " z=" + std::to_string(p.params[0].second).substr(0, 3) + " rel_err " + sci(p.rel_err) +
            (p.truncated ? " (tail flagged)" : "");
  out.info.push_back(line);
}

// 3. Laplace bridge between the Hilbert-transform integral and the series.
void laplace_bridge(Outcome& out) {
  auto p1 = spec(CheckKind::Laplace, "p1");
  p1.s = {-1.0, -10.0};
  p1.degree = 20;
  p1.tol = 1e-6;
  const auto r = expect_pass(out, p1);
  const double q = std::sqrt(24.0);
  const double closed[] = {2.0 * std::numbers::pi / (3.0 * std::sqrt(3.0)), std::log((5.0 + q) / (5.0 - q)) / (2.0 * q)};
  for (int i = 0; i < 2; ++i) {
    const double e = rel_err(r.points.at(i).lhs, closed[i]);
    out.require(e < 1e-6, "P1 integral side vs closed form at s = " + std::to_string(p1.s[i]));
    out.details.push_back("P1 s=" + std::to_string(static_cast<int>(p1.s[i])) + " integral vs closed form " + sci(e));
  }
  auto p2 = spec(CheckKind::Laplace, "p2");
  p2.s = {-20.0};
  p2.degree = 12;
  p2.tol = 1e-5;
  expect_pass(out, p2);
}

// 4. Local charge: 2 pi i x volume against the canonical-bundle series.
void local_charge(Outcome& out) {
  auto p1 = spec(CheckKind::Local, "p1");
  p1.s = {5.0, 10.0, 20.0};
  p1.degree = 20;
  p1.tol = 1e-4;
  const auto r = expect_pass(out, p1);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const double s = p1.s[i];
    const Complex closed = kTwoPiI * (2.0 * std::acosh(s / 2.0));
    out.require(rel_err(closed, r.points[i].rhs) < 1e-4, "P1 closed form vs series at s = " + std::to_string(s));
    double imag_ratio = 1.0;
    for (const auto& [k, v] : r.points[i].extra)
      if (k == "imag_ratio") imag_ratio = v;
    out.require(imag_ratio < 1e-8, "P1 series reality at s = " + std::to_string(s));
  }
  auto p2 = spec(CheckKind::Local, "p2");
  p2.s = {20.0};
  p2.degree = 12;
  p2.tol = 1e-3;
  expect_pass(out, p2);
}

// 5. Anticanonical charge and the series-side derivative identity.
void anticanonical(Outcome& out) {
  auto p1 = spec(CheckKind::Anticanonical, "p1");
  p1.s = {10.0};
  p1.degree = 20;
  p1.tol = 1e-3;
  const auto r = expect_pass(out, p1);
  const double s = 10.0;
  out.require(rel_err(2.0 * s / std::sqrt(s * s - 4.0), r.points.at(0).rhs) < 1e-3, "P1 2s/sqrt(s^2-4) vs series");
  auto p2 = spec(CheckKind::Anticanonical, "p2");
  p2.s = {30.0};
  p2.degree = 12;
  p2.tol = 1e-3;
  const auto r2 = expect_pass(out, p2);
  for (const auto* rep : {&r, &r2})
    for (const auto& p : rep->points)
      if (p.kind == "derivative-identity") {
        out.require(p.rel_err < 1e-6, "derivative identity on " + rep->fixture);
        out.details.push_back(rep->fixture + " derivative identity " + sci(p.rel_err));
      }
}

// 6. Nef-partition identity, section side.
void generalized(Outcome& out) {
  auto p2 = spec(CheckKind::Generalized, "p2");
  p2.partition = {{0}};
  p2.s = {20.0};
  p2.z = {1.0};
  p2.degree = 12;
  p2.tol = 1e-3;
  expect_pass(out, p2);
  auto q = spec(CheckKind::Generalized, "p1xp1");
  q.partition = {{0, 1}};
  q.s = {20.0};
  q.z = {1.0};
  q.degree = 12;
  q.tol = 1e-3;
  expect_pass(out, q);
}

// 7. Angle between J(c1 log t, 1) and the Gamma class.
void gamma_I(Outcome& out) {
  for (const char* name : {"p1", "p2"}) {
    auto s = spec(CheckKind::GammaI, name);
    s.t = {10.0, 30.0, 100.0};
    s.tol = 0.05;
    const auto r = expect_pass(out, s);
    std::string line = std::string(name) + " log10 angles:";
    for (const auto& p : r.points) line += " " + std::to_string(p.extra.at(0).second).substr(0, 7);
    out.details.push_back(line);
  }
}

// J_d(z) at a rational z straight from the product formula.
ExactClass j_term_at(const RingPtr& ring, const CurveClass& d, const Rational& z) {
  ExactClass out = ExactClass::unit(ring);
  for (int j = 0; j < ring->fan().num_rays(); ++j) {
    const ExactClass D = exact_divisor(ring, j);
    const int m = d.pairing[j];
    for (int k = 1; k <= m; ++k) out = out * inverse(D + ExactClass::constant(ring, z * k));
    for (int k = m + 1; k <= 0; ++k) out = out * (D + ExactClass::constant(ring, z * k));
  }
  return out;
}

// 8. Property suites.
void properties(Outcome& out) {
  // Homogeneity: stored coefficients times z^{exponent} reproduce J_d(z) exactly.
  int terms = 0;
  for (const auto& name : kFixtures) {
    const auto ring = CohRing::build(load_fan(fixture(name)));
    const auto J = toric_j_coefficients(ring, 8);
    for (const Rational z : {Rational(2), Rational(-3), Rational(5, 7)})
      for (const auto& t : J.terms) {
        const ExactClass direct = j_term_at(ring, t.d, z);
        for (std::size_t i = 0; i < ring->size(); ++i) {
          const int e = t.z_exponent(i);
          Rational zp = 1;
          for (int k = 0; k < std::abs(e); ++k) zp *= z;
          if (e < 0) zp = 1 / zp;
          out.require(direct[i] == (*t.exact)[i] * zp, name + " homogeneity at degree " + std::to_string(t.d.degree));
        }
        ++terms;
      }
  }
  out.details.push_back("homogeneity exact on " + std::to_string(terms) + " term evaluations");

  // Gamma_Y prod Gamma(1 + v_i) = Gamma_F.
  struct Split {
    const char* fan;
    std::vector<std::vector<int>> parts;
  };
  double worst = 0.0;
  for (const auto& sp : {Split{"p1", {{0, 1}}}, Split{"p2", {{0, 1, 2}}}, Split{"p2", {{0}}}, Split{"p1xp1", {{0, 1}}},
                         Split{"bl1p2", {{0, 1, 2, 3}}}, Split{"p3", {{0, 1}, {2, 3}}}, Split{"p3", {{0, 1, 2, 3}}}}) {
    const auto ring = CohRing::build(load_fan(fixture(sp.fan)));
    const auto gF = gamma_class(ring);
    std::vector<GradedClass> v;
    for (const auto& part : sp.parts) v.push_back(DivisorClass::sum_of(ring->fan().num_rays(), part).to_class(ring));
    GradedClass prod = gamma_of_quotient(gF, v);
    for (const auto& vi : v) prod = prod * gamma_1p(vi);
    for (std::size_t i = 0; i < gF.size(); ++i) worst = std::max(worst, std::abs(prod[i] - gF[i]));
  }
  out.require(worst < 1e-14, "Gamma_Y prod Gamma(1 + v_i) = Gamma_F");
  out.details.push_back("Gamma quotient identity worst coefficient error " + sci(worst));

  // region_volume: zero below T and monotone above.
  for (const auto& name : {"p2", "p1xp1", "bl1p2"}) {
    const auto W = build_mirror(load_fan(fixture(name)), std::vector<double>(name == std::string("p2") ? 3 : 4, 0.0));
    const double T = minimize_log(W).T;
    const auto below = region_volume({W}, {0.99 * T});
    out.require(below.value == 0.0 && below.exact, std::string(name) + " volume below T");
    double prev = 0.0;
    for (double f : {1.01, 1.5, 3.0, 10.0}) {
      const double v = region_volume({W}, {f * T}).value.real();
      out.require(v > prev, std::string(name) + " volume monotone");
      prev = v;
    }
  }

  // Newton minimizer on random mirrors.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  double worst_grad = 0.0;
  for (const auto& name : kFixtures) {
    const auto fan = load_fan(fixture(name));
    for (int k = 0; k < 5; ++k) {
      std::vector<double> lambda(fan.num_rays());
      for (auto& l : lambda) l = U(rng);
      worst_grad = std::max(worst_grad, minimize_log(build_mirror(fan, lambda)).gradient_norm);
    }
  }
  out.require(worst_grad < 1e-12, "Newton gradient norm");
  out.details.push_back("Newton worst gradient norm " + sci(worst_grad));

  // Monte Carlo determinism under a fixed seed, across thread counts.
  {
    const auto W = build_mirror(load_fan(fixture("p3")), {0, 0, 0, 0});
    IntegralOptions opt;
    opt.method = IntegralMethod::MonteCarlo;
    opt.mc_batches = 16;
    opt.threads = 1;
    const auto a = oscillatory_integral(W, 1.0, opt);
    opt.threads = 4;
    const auto b = oscillatory_integral(W, 1.0, opt);
    out.require(a.value == b.value && a.error_estimate == b.error_estimate, "Monte Carlo determinism");
  }

  // Laplace transform of t^{-c1 + m}, coefficient by coefficient in c1.
  boost::math::quadrature::exp_sinh<double> integrator;
  double worst_laplace = 0.0;
  for (const char* name : {"p1", "p2", "p3"}) {
    const auto ring = CohRing::build(load_fan(fixture(name)));
    const auto c1 = to_complex(exact_c1(ring));
    const int n = ring->dim();
    for (double s : {-2.0, -10.0})
      for (int m = 0; m <= 6; ++m) {
        std::vector<Complex> coeff(n + 1);
        for (int p = 0; p <= n; ++p) {
          const double fact = std::tgamma(p + 1.0);
          coeff[p] = integrator.integrate([&](double t) {
            if (t <= 0.0) return 0.0;
            const double lt = std::log(t);
            return std::exp(s * t + m * lt) * std::pow(-lt, p) / fact;
          });
        }
        const auto numeric = power_series<Complex>(c1, coeff);
        const auto exact = laplace_of_monomial(ring, m, s);
        double scale = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i) scale = std::max(scale, std::abs(exact[i]));
        for (std::size_t i = 0; i < exact.size(); ++i)
          worst_laplace = std::max(worst_laplace, std::abs(numeric[i] - exact[i]) / scale);
      }
  }
  out.require(worst_laplace < 1e-10, "Laplace of monomial termwise identity");
  out.details.push_back("Laplace of monomial worst relative error " + sci(worst_laplace));
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Duistermaat-Heckman exactness", 1.0, dh_exactness},
      {2, "ms-gamma identity", 30.0, ms_gamma},
      {3, "Laplace bridge", 30.0, laplace_bridge},
      {4, "local charge", 60.0, local_charge},
      {5, "anticanonical charge", 60.0, anticanonical},
      {6, "generalized identity (section side)", 120.0, generalized},
      {7, "Gamma conjecture I trend", 30.0, gamma_I},
      {8, "property suites", 60.0, properties},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.details.push_back(std::string("error: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > c.budget_s) {
      out.pass = false;
      out.details.push_back("runtime over budget of " + std::to_string(static_cast<int>(c.budget_s)) + " s");
    }
    all = all && out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << std::fixed << std::setprecision(2)
              << elapsed << " s)" << std::defaultfloat << '\n';
    for (const auto& d : out.details) std::cout << "       " << d << '\n';
    for (const auto& i : out.info) std::cout << "       note: " << i << '\n';
  }
  std::cout << (all ? "all acceptance criteria passed" : "some acceptance criteria failed") << std::endl;
  return all ? 0 : 1;
}
