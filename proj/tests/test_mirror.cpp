#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/roots.hpp>

#include "mirrorgamma/mirror/integrals.hpp"
#include "mirrorgamma/toric/polytope.hpp"

using namespace mirrorgamma;

namespace {

std::string fixture(const std::string& name) { return std::string(MIRRORGAMMA_FIXTURE_DIR) + "/" + name + ".fan"; }

LaurentPoly mirror_of(const std::string& name, std::vector<double> lambda = {}) {
  const auto fan = load_fan(fixture(name));
  if (lambda.empty()) lambda.assign(fan.num_rays(), 0.0);
  return build_mirror(fan, lambda);
}

LaurentPoly poly(int n, std::vector<LaurentTerm> terms) { return LaurentPoly(n, std::move(terms)); }

const LaurentPoly kLine = poly(1, {{1.0, {1}}, {1.0, {-1}}});

double bessel_k0(double x) { return boost::math::cyl_bessel_k(0, x); }

}  // namespace

TEST(BuildMirror, Examples) {
  const auto W1 = mirror_of("p1");
  ASSERT_EQ(W1.terms().size(), 2u);
  EXPECT_EQ(W1.terms()[0].exponent, (IntVector{1}));
  EXPECT_EQ(W1.terms()[1].exponent, (IntVector{-1}));
  const auto W2 = mirror_of("p2", {std::log(2.0), 0.0, 0.0});
  EXPECT_DOUBLE_EQ(W2.terms()[0].coeff, 0.5);
  EXPECT_DOUBLE_EQ(W2.terms()[1].coeff, 1.0);
  EXPECT_EQ(W2.terms()[2].exponent, (IntVector{-1, -1}));
  const double t[2] = {std::log(2.0), std::log(3.0)};
  EXPECT_NEAR(W2(t), 1.0 + 3.0 + 1.0 / 6.0, 1e-15);
}

TEST(BuildMirror, PartitionGroupsTerms) {
  const auto fan = load_fan(fixture("p1xp1"));
  const auto parts = build_mirror_partition(fan, {0, 0, 0, 0}, {{0, 1}});
  ASSERT_EQ(parts.Ws.size(), 1u);
  EXPECT_EQ(parts.Ws[0].terms().size(), 2u);
  EXPECT_EQ(parts.W0.terms().size(), 2u);
  EXPECT_EQ(parts.W0.terms()[0].exponent, (IntVector{0, 1}));
  EXPECT_THROW(build_mirror_partition(fan, {0, 0, 0, 0}, {{0, 1}, {1}}), std::invalid_argument);
}

TEST(Assumptions, Examples) {
  const auto ok = check_assumptions(kLine);
  EXPECT_TRUE(ok.ok());
  ASSERT_EQ(ok.weights.size(), 2u);
  EXPECT_EQ(ok.weights[0], Rational(1, 2));
  EXPECT_EQ(ok.weights[1], Rational(1, 2));

  const auto not_interior = check_assumptions(poly(1, {{1.0, {1}}, {1.0, {2}}}));
  EXPECT_FALSE(not_interior.origin_interior);
  EXPECT_TRUE(not_interior.positive_coefficients);

  const auto negative = check_assumptions(poly(1, {{1.0, {1}}, {-1.0, {-1}}}));
  EXPECT_TRUE(negative.origin_interior);
  EXPECT_FALSE(negative.positive_coefficients);

  // A segment through the origin in the plane is not full dimensional.
  EXPECT_FALSE(check_assumptions(poly(2, {{1.0, {1, 0}}, {1.0, {-1, 0}}})).origin_interior);
}

TEST(Assumptions, FixturesAndWeights) {
  for (const char* name : {"p1", "p2", "p1xp1", "bl1p2", "p3"}) {
    const auto W = mirror_of(name);
    const auto rep = check_assumptions(W);
    ASSERT_TRUE(rep.ok()) << name;
    std::vector<Rational> sum(W.dim(), Rational(0));
    Rational total = 0;
    for (std::size_t j = 0; j < rep.weights.size(); ++j) {
      EXPECT_GT(rep.weights[j], 0) << name;
      total += rep.weights[j];
      for (int a = 0; a < W.dim(); ++a) sum[a] += rep.weights[j] * W.terms()[j].exponent[a];
    }
    EXPECT_EQ(total, 1) << name;
    for (const auto& x : sum) EXPECT_EQ(x, 0) << name;
  }
}

TEST(Minimize, Examples) {
  const auto a = minimize_log(kLine);
  EXPECT_NEAR(a.T, 2.0, 1e-15);
  EXPECT_NEAR(a.argmin_log[0], 0.0, 1e-15);
  const auto b = minimize_log(mirror_of("p2"));
  EXPECT_NEAR(b.T, 3.0, 1e-14);
  EXPECT_NEAR(b.argmin_log.norm(), 0.0, 1e-14);
  const auto c = minimize_log(poly(1, {{0.5, {1}}, {2.0, {-1}}}));
  EXPECT_NEAR(c.T, 2.0, 1e-15);
  EXPECT_NEAR(c.argmin_log[0], std::log(2.0), 1e-14);
}

TEST(Minimize, GradientBelowThresholdOnRandomMirrors) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (const char* name : {"p1", "p2", "p1xp1", "bl1p2", "p3"}) {
    const auto fan = load_fan(fixture(name));
    for (int k = 0; k < 5; ++k) {
      std::vector<double> lambda(fan.num_rays());
      for (auto& l : lambda) l = U(rng);
      const auto r = minimize_log(build_mirror(fan, lambda));
      EXPECT_LT(r.gradient_norm, 1e-12) << name;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.hessian);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << name;
    }
  }
}

TEST(Minimize, ReportsIterationBudget) {
  EXPECT_THROW(minimize_log(poly(1, {{0.5, {1}}, {2.0, {-1}}}), 1e-12, 1), ConvergenceError);
}

TEST(Convexity, HessianIsPositiveSemidefiniteInTheRegion) {
  std::mt19937_64 rng(11);
  for (const char* name : {"p2", "p1xp1", "bl1p2", "p3"}) {
    const auto W = mirror_of(name);
    ConvexRegion region({{W, 50.0}}, W.dim());
    int checked = 0;
    while (checked < 100) {
      Eigen::VectorXd t(W.dim());
      for (int a = 0; a < W.dim(); ++a)
        t[a] = std::uniform_real_distribution<double>(region.lower()[a], region.upper()[a])(rng);
      if (region.G(t.data()) > 0.0) continue;
      Eigen::VectorXd g;
      Eigen::MatrixXd H;
      W.derivatives(t, g, H);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * es.eigenvalues().maxCoeff()) << name;
      ++checked;
    }
  }
}

TEST(Oscillatory, LineAgainstBessel) {
  for (double z : {0.5, 1.0, 2.0}) {
    const auto r = oscillatory_integral(kLine, z);
    EXPECT_NEAR(r.value.real(), 2.0 * bessel_k0(2.0 / z), 1e-13) << z;
    EXPECT_EQ(r.method, IntegralMethod::Quadrature);
  }
  // x/2 + 2/x: 2 K_0(2 sqrt(1)/z) with the product of coefficients equal to 1.
  EXPECT_NEAR(oscillatory_integral(poly(1, {{0.5, {1}}, {2.0, {-1}}}), 1.0).value.real(), 2.0 * bessel_k0(2.0), 1e-13);
}

TEST(Oscillatory, PlaneLaplaceApproximation) {
  const auto W = mirror_of("p2");
  const auto m = minimize_log(W);
  const double z = 0.05;
  const double v = oscillatory_integral(W, z).value.real();
  const double ratio = v * std::exp(m.T / z) / (2.0 * std::numbers::pi * z) * std::sqrt(m.hessian.determinant());
  EXPECT_NEAR(ratio, 1.0, 0.05);
}

TEST(Oscillatory, ExponentialRateAsZShrinks) {
  // value * e^{T/z} increases with z, and z (log value + T/z) -> 0.
  const auto W = mirror_of("p2");
  const double T = minimize_log(W).T;
  double previous = std::numeric_limits<double>::infinity();
  for (double z : {1.0, 0.5, 0.2, 0.1, 0.05}) {
    const double v = oscillatory_integral(W, z).value.real();
    const double scaled = v * std::exp(T / z);
    EXPECT_LT(scaled, previous) << z;
    previous = scaled;
    EXPECT_LT(std::abs(z * std::log(v) + T), 2.0 * z * (1.0 + std::abs(std::log(z)))) << z;
  }
}

TEST(Oscillatory, MonteCarloAgreesWithQuadrature) {
  const auto W = mirror_of("p3");
  const auto quad = oscillatory_integral(W, 1.0);
  IntegralOptions opt;
  opt.method = IntegralMethod::MonteCarlo;
  const auto mc = oscillatory_integral(W, 1.0, opt);
  EXPECT_EQ(mc.method, IntegralMethod::MonteCarlo);
  ASSERT_TRUE(mc.seed.has_value());
  EXPECT_GT(mc.error_estimate, 0.0);
  EXPECT_LT(std::abs(mc.value - quad.value), 4.0 * mc.error_estimate);
}

TEST(MonteCarlo, DeterministicUnderFixedSeed) {
  const auto W = mirror_of("p3");
  IntegralOptions opt;
  opt.method = IntegralMethod::MonteCarlo;
  opt.mc_batches = 16;
  opt.threads = 1;
  const auto a = oscillatory_integral(W, 1.0, opt);
  opt.threads = 4;
  const auto b = oscillatory_integral(W, 1.0, opt);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.error_estimate, b.error_estimate);
  opt.seed += 1;
  const auto c = oscillatory_integral(W, 1.0, opt);
  EXPECT_NE(a.value, c.value);
  const auto v1 = region_volume({W}, {10.0}, std::nullopt, opt);
  const auto v2 = region_volume({W}, {10.0}, std::nullopt, opt);
  EXPECT_EQ(v1.value, v2.value);
}

TEST(Hilbert, LineClosedForms) {
  EXPECT_NEAR(hilbert_integral(kLine, -1.0).value.real(), 2.0 * std::numbers::pi / (3.0 * std::sqrt(3.0)), 1e-10);
  const double r24 = std::sqrt(24.0);
  EXPECT_NEAR(hilbert_integral(kLine, -10.0).value.real(), std::log((5.0 + r24) / (5.0 - r24)) / (2.0 * r24), 1e-10);
}

TEST(Hilbert, ComplexArgumentAgainstLineQuadrature) {
  const std::complex<double> s(1.0, 1.0);
  boost::math::quadrature::sinh_sinh<double> rule;
  const double re = rule.integrate([&](double t) { return (1.0 / (2.0 * std::cosh(t) - s)).real(); });
  const double im = rule.integrate([&](double t) { return (1.0 / (2.0 * std::cosh(t) - s)).imag(); });
  const auto r = hilbert_integral(kLine, s);
  EXPECT_NEAR(r.value.real(), re, 1e-9);
  EXPECT_NEAR(r.value.imag(), im, 1e-9);
}

TEST(Hilbert, FarFromTheCutIsSmall) {
  const auto W = mirror_of("p2");
  const double v = hilbert_integral(W, 3.0 - 1e6).value.real();
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1e-3);
}

TEST(Hilbert, RejectsTheCut) {
  EXPECT_THROW(hilbert_integral(kLine, 3.0), std::domain_error);
  EXPECT_THROW(hilbert_integral(kLine, 2.0), std::domain_error);
  EXPECT_NO_THROW(hilbert_integral(kLine, 1.0));
}

TEST(MultiHilbert, ReducesToSingleFactor) {
  const auto W = mirror_of("p2");
  const LaurentPoly none(2, {});
  const auto a = multi_hilbert_integral(none, {W}, {-20.0}, 1.0);
  const auto b = hilbert_integral(W, -20.0);
  EXPECT_NEAR(a.value.real(), b.value.real(), 1e-10 * std::abs(b.value));
  const auto c = multi_hilbert_integral(none, {W}, {-20.0}, 2.0);
  EXPECT_NEAR(c.value.real(), 2.0 * a.value.real(), 1e-14 * std::abs(a.value));
  const double r24 = std::sqrt(24.0);
  EXPECT_NEAR(multi_hilbert_integral(LaurentPoly(1, {}), {kLine}, {-10.0}, 1.0).value.real(),
              std::log((5.0 + r24) / (5.0 - r24)) / (2.0 * r24), 1e-10);
}

TEST(MultiHilbert, ProductOfLines) {
  // Two independent factors on the product of lines separate into a product of 1-d integrals.
  const auto A = poly(2, {{1.0, {1, 0}}, {1.0, {-1, 0}}});
  const auto B = poly(2, {{1.0, {0, 1}}, {1.0, {0, -1}}});
  const auto r = multi_hilbert_integral(LaurentPoly(2, {}), {A, B}, {-10.0, -1.0}, 1.0);
  const double r24 = std::sqrt(24.0);
  const double oracle = std::log((5.0 + r24) / (5.0 - r24)) / (2.0 * r24) * 2.0 * std::numbers::pi / (3.0 * std::sqrt(3.0));
  EXPECT_NEAR(r.value.real(), oracle, 1e-8);
}

TEST(RegionVolume, LineClosedForm) {
  EXPECT_NEAR(region_volume({kLine}, {3.0}).value.real(), 2.0 * std::acosh(1.5), 1e-13);
  const auto at_T = region_volume({kLine}, {2.0});
  EXPECT_EQ(at_T.value, 0.0);
  EXPECT_TRUE(at_T.exact);
  const auto below = region_volume({kLine}, {1.0});
  EXPECT_EQ(below.value, 0.0);
  EXPECT_TRUE(below.exact);
}

TEST(RegionVolume, MonotoneInLevel) {
  for (const char* name : {"p2", "p1xp1", "bl1p2"}) {
    const auto W = mirror_of(name);
    const double T = minimize_log(W).T;
    EXPECT_EQ(region_volume({W}, {0.99 * T}).value, 0.0) << name;
    double previous = 0.0;
    for (double f : {1.01, 1.5, 3.0, 10.0}) {
      const double v = region_volume({W}, {f * T}).value.real();
      EXPECT_GT(v, previous) << name;
      previous = v;
    }
  }
}

TEST(RegionVolume, WeightedHalfLineAgainstExponentialIntegral) {
  // {x <= s} with weight e^{-1/(x z)}: int_{1/s}^inf e^{-u/z} du/u = E_1(1/(s z)).
  const auto W1 = poly(1, {{1.0, {1}}});
  const auto W0 = poly(1, {{1.0, {-1}}});
  for (double s : {2.0, 20.0}) {
    const auto r = region_volume({W1}, {s}, Weight{W0, 1.0});
    EXPECT_NEAR(r.value.real(), boost::math::expint(1, 1.0 / s), 1e-10) << s;
  }
}

TEST(RegionVolume, DuistermaatHeckmanLeadingTerm) {
  const auto fan = load_fan(fixture("p2"));
  const auto W = build_mirror(fan, {0, 0, 0});
  double previous = 1.0;
  for (int m : {10, 20, 40}) {
    const double v = region_volume({W}, {std::exp(static_cast<double>(m))}).value.real();
    const auto P = moment_polytope(fan, {Rational(m), Rational(m), Rational(m)});
    const double gap = std::abs(v / to_double(P.volume) - 1.0);
    EXPECT_LT(gap, previous) << m;
    previous = gap;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(FiberIntegral, LineClosedForm) {
  for (double s : {3.0, 10.0}) EXPECT_NEAR(fiber_integral({kLine}, {s}).value.real(), 2.0 / std::sqrt(s * s - 4.0), 1e-8) << s;
}

TEST(FiberIntegral, LineAgainstSumOverRoots) {
  // sum over roots of W(x) = s of 1/|x W'(x)|.
  const auto W = poly(1, {{0.5, {1}}, {2.0, {-1}}});
  const double s = 7.0;
  const double disc = std::sqrt(s * s - 4.0);
  double oracle = 0.0;
  for (double x : {s + disc, s - disc}) oracle += 1.0 / std::abs(0.5 * x - 2.0 / x);
  EXPECT_NEAR(fiber_integral({W}, {s}).value.real(), oracle, 1e-6);
}

TEST(FiberIntegral, PlaneAgainstDirectFiber) {
  // On W = e^{t1} + e^{t2} + e^{-t1-t2} = s the roots in y = e^{t2} give sum 1/|dW/dt2| = 2/sqrt(B^2 - 4a),
  // with B = s - e^{t1} and a = e^{-t1}.
  const double s = 30.0;
  auto disc = [&](double t1) {
    const double B = s - std::exp(t1);
    return B > 0.0 ? B * B - 4.0 * std::exp(-t1) : -1.0;
  };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t it = 200;
  const auto lo = boost::math::tools::bisect(disc, -20.0, 0.0, tol, it);
  it = 200;
  const auto hi = boost::math::tools::bisect(disc, 0.0, std::log(s), tol, it);
  const double a = 0.5 * (lo.first + lo.second), b = 0.5 * (hi.first + hi.second);
  boost::math::quadrature::tanh_sinh<double> rule;
  const double oracle = rule.integrate(
      [&](double t1) {
        const double d = disc(t1);
        return d > 0.0 ? 2.0 / std::sqrt(d) : 0.0;
      },
      a, b);
  const auto W = mirror_of("p2");
  EXPECT_NEAR(fiber_integral({W}, {s}).value.real(), oracle, 1e-6 * oracle);
  // Two step sizes agree.
  const auto r = fiber_integral({W}, {10.0});
  EXPECT_LT(r.error_estimate, 1e-3 * std::abs(r.value));
}

TEST(FiberIntegral, WeightedPlaneAgainstBessel) {
  const auto fan = load_fan(fixture("p2"));
  const auto parts = build_mirror_partition(fan, {0, 0, 0}, {{0}});
  const double s = 20.0;
  const auto r = fiber_integral(parts.Ws, {s}, Weight{parts.W0, 1.0});
  EXPECT_NEAR(s * r.value.real(), 2.0 * bessel_k0(2.0 / std::sqrt(s)), 1e-7);
}

TEST(FiberIntegral, ProductOfLinesSeparates) {
  const auto fan = load_fan(fixture("p1xp1"));
  const auto parts = build_mirror_partition(fan, {0, 0, 0, 0}, {{0, 1}});
  const double s = 20.0;
  const auto r = fiber_integral(parts.Ws, {s}, Weight{parts.W0, 1.0});
  EXPECT_NEAR(r.value.real(), 2.0 / std::sqrt(s * s - 4.0) * 2.0 * bessel_k0(2.0), 1e-9);
}

TEST(FiberIntegral, TwoConstraintsGiveMixedDerivative) {
  // [x1 + 1/x1, x2 + 1/x2] at (s1, s2): the box volume factorizes, so the mixed derivative does too.
  const auto A = poly(2, {{1.0, {1, 0}}, {1.0, {-1, 0}}});
  const auto B = poly(2, {{1.0, {0, 1}}, {1.0, {0, -1}}});
  const auto r = fiber_integral({A, B}, {5.0, 8.0});
  EXPECT_NEAR(r.value.real(), 2.0 / std::sqrt(21.0) * 2.0 / std::sqrt(60.0), 1e-7);
}

TEST(FiberIntegral, RejectsDegenerateLevel) {
  EXPECT_THROW(fiber_integral({kLine}, {2.0005}), IntegrationError);
}
