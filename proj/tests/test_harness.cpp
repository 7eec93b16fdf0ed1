#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/special_functions/bessel.hpp>

#include "mirrorgamma/harness/checks.hpp"

using namespace mirrorgamma;
namespace fs = std::filesystem;

namespace {

fs::path fixture(const std::string& name) { return fs::path(MIRRORGAMMA_FIXTURE_DIR) / (name + ".fan"); }

CheckSpec spec_for(CheckKind kind, const std::string& fan) {
  CheckSpec s = default_spec(kind);
  s.fan = fixture(fan);
  return s;
}

bool has_note(const CheckReport& r, const std::string& needle) {
  for (const auto& p : r.points)
    for (const auto& n : p.notes)
      if (n.find(needle) != std::string::npos) return true;
  return false;
}

bool has_diagnostic(const CheckReport& r, const std::string& needle) {
  for (const auto& d : r.diagnostics)
    if (d.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(RelErr, UsesFloor) {
  EXPECT_EQ(rel_err(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(rel_err(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(rel_err(1e-310, 0.0), 1e-310 / 1e-300);
}

TEST(SpecParsing, LambdaEntries) {
  EXPECT_EQ(parse_lambda_entry("3/2"), Rational(3, 2));
  EXPECT_EQ(parse_lambda_entry("-2"), Rational(-2));
  EXPECT_EQ(parse_lambda_entry("0.5"), Rational(1, 2));
  EXPECT_EQ(to_double(parse_lambda_entry("ln(2)")), std::log(2.0));
  EXPECT_THROW(parse_lambda_entry("abc"), SpecError);
  EXPECT_THROW(parse_lambda_entry("ln(-1)"), SpecError);
  EXPECT_THROW(parse_lambda_entry("1/0"), SpecError);
}

TEST(SpecParsing, Partition) {
  EXPECT_EQ(parse_partition("0,1;2,3"), (std::vector<std::vector<int>>{{0, 1}, {2, 3}}));
  EXPECT_EQ(parse_partition("0"), (std::vector<std::vector<int>>{{0}}));
  EXPECT_TRUE(parse_partition("").empty());
  EXPECT_THROW(parse_partition("0,x"), SpecError);
}

TEST(SpecParsing, Validation) {
  auto s = spec_for(CheckKind::MsGamma, "p1");
  s.tol = 0.0;
  EXPECT_THROW(s.validate(), SpecError);
  s = spec_for(CheckKind::Local, "p1");
  s.s.clear();
  EXPECT_THROW(s.validate(), SpecError);
  s = spec_for(CheckKind::GammaI, "p1");
  s.t = {30.0, 10.0};
  EXPECT_THROW(check_gamma_I(s), SpecError);
  s = spec_for(CheckKind::MsGamma, "p1");
  s.lambda = {Rational(0)};
  EXPECT_THROW(check_ms_gamma(s), SpecError);
}

TEST(SpecParsing, ShippedConfigsLoad) {
  const auto specs = load_fixture_configs(MIRRORGAMMA_FIXTURE_DIR);
  EXPECT_GE(specs.size(), 25u);
  for (const auto& s : specs) {
    EXPECT_NO_THROW(s.validate()) << s.fan;
    EXPECT_TRUE(fs::exists(s.fan)) << s.fan;
  }
  EXPECT_THROW(apply_json(CheckSpec{}, nlohmann::json{{"method", "simpson"}}, "."), SpecError);
  EXPECT_THROW(load_config("/nonexistent/p1.checks.json"), IoError);
}

TEST(MsGammaCheck, LineExample) {
  auto s = spec_for(CheckKind::MsGamma, "p1");
  s.z = {0.5, 1.0, 2.0};
  s.degree = 20;
  s.tol = 1e-6;
  const auto r = check_ms_gamma(s);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_NEAR(r.points[1].lhs.real(), 2.0 * boost::math::cyl_bessel_k(0, 2.0), 1e-12);
  ASSERT_TRUE(r.points[1].oracle.has_value());
  EXPECT_TRUE(r.points[1].oracle->pass);
  for (const auto& p : r.points) EXPECT_FALSE(p.truncated);
}

TEST(MsGammaCheck, TauFamily) {
  auto s = spec_for(CheckKind::MsGamma, "p1");
  s.lambda = {parse_lambda_entry("ln(2)"), Rational(0)};
  s.z = {1.0};
  s.degree = 20;
  EXPECT_TRUE(check_ms_gamma(s).pass);
}

TEST(MsGammaCheck, PlaneExtendsTruncation) {
  auto s = spec_for(CheckKind::MsGamma, "p2");
  s.z = {1.0};
  s.degree = 12;
  s.tol = 1e-5;
  const auto r = check_ms_gamma(s);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(has_note(r, "truncation extended from N = 12"));
  // At the literal truncation the tail is flagged and the check fails.
  s.extend_truncation = false;
  const auto literal = check_ms_gamma(s);
  EXPECT_FALSE(literal.pass);
  EXPECT_TRUE(literal.points[0].truncated);
  EXPECT_GT(literal.points[0].rel_err, 1e-5);
}

TEST(MsGammaCheck, MonteCarloTolerance) {
  auto s = spec_for(CheckKind::MsGamma, "p2");
  s.z = {1.0};
  s.tol = 1e-6;
  s.method = IntegralMethod::MonteCarlo;
  const auto a = check_ms_gamma(s);
  ASSERT_EQ(a.points.size(), 1u);
  const auto& p = a.points[0];
  ASSERT_TRUE(p.standard_error.has_value());
  EXPECT_EQ(p.method, "mc");
  EXPECT_DOUBLE_EQ(p.tol, std::max(1e-6, 4.0 * *p.standard_error));
  EXPECT_EQ(to_json(a).dump(), to_json(check_ms_gamma(s)).dump());
}

TEST(LocalChargeCheck, LineExample) {
  auto s = spec_for(CheckKind::Local, "p1");
  s.s = {5.0, 10.0, 20.0};
  s.degree = 20;
  s.tol = 1e-4;
  const auto r = check_local_charge(s);
  EXPECT_TRUE(r.pass);
  for (const auto& p : r.points) {
    const double sv = p.params[0].second;
    EXPECT_NEAR((p.lhs / Complex(0.0, 2.0 * std::numbers::pi)).real(), 2.0 * std::acosh(sv / 2.0), 1e-9);
    ASSERT_TRUE(p.oracle.has_value());
  }
}

TEST(LocalChargeCheck, PlaneExample) {
  auto s = spec_for(CheckKind::Local, "p2");
  s.s = {20.0};
  s.degree = 12;
  s.tol = 1e-3;
  EXPECT_TRUE(check_local_charge(s).pass);
}

TEST(LocalChargeCheck, RejectsEmptyCycle) {
  auto s = spec_for(CheckKind::Local, "p1");
  s.s = {1.0};
  auto r = check_local_charge(s);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(has_diagnostic(r, "cycle empty: s ≤ T"));
  s.s = {3.0};
  r = check_local_charge(s);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(has_diagnostic(r, "margin"));
}

TEST(AnticanonicalCheck, LineExample) {
  auto s = spec_for(CheckKind::Anticanonical, "p1");
  s.s = {10.0};
  s.degree = 20;
  const auto r = check_anticanonical(s);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_NEAR(r.points[0].lhs.real(), 10.0 * 2.0 / std::sqrt(96.0), 1e-8);
  EXPECT_EQ(r.points[1].kind, "derivative-identity");
  EXPECT_LT(r.points[1].rel_err, 1e-6);
}

TEST(AnticanonicalCheck, PlaneExample) {
  auto s = spec_for(CheckKind::Anticanonical, "p2");
  s.s = {30.0};
  s.degree = 12;
  EXPECT_TRUE(check_anticanonical(s).pass);
}

TEST(LaplaceCheck, LineExamples) {
  auto s = spec_for(CheckKind::Laplace, "p1");
  s.s = {-1.0, -10.0};
  s.degree = 20;
  s.tol = 1e-6;
  const auto r = check_laplace_crosscheck(s);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.points[0].lhs.real(), 2.0 * std::numbers::pi / (3.0 * std::sqrt(3.0)), 1e-10);
  const double q = std::sqrt(24.0);
  EXPECT_NEAR(r.points[1].lhs.real(), std::log((5.0 + q) / (5.0 - q)) / (2.0 * q), 1e-10);
  EXPECT_NEAR(r.points[0].rhs.real(), r.points[0].lhs.real(), 1e-10);
}

TEST(LaplaceCheck, PlaneExampleAndSign) {
  auto s = spec_for(CheckKind::Laplace, "p2");
  s.s = {-20.0};
  s.degree = 12;
  EXPECT_TRUE(check_laplace_crosscheck(s).pass);
  s.s = {1.0};
  EXPECT_FALSE(check_laplace_crosscheck(s).pass);
}

TEST(GeneralizedCheck, EmptyPartitionIsMsGamma) {
  auto s = spec_for(CheckKind::Generalized, "p1");
  s.z = {1.0, 2.0};
  s.partition.clear();
  auto g = check_generalized(s);
  s.kind = CheckKind::MsGamma;
  auto m = check_ms_gamma(s);
  EXPECT_EQ(g.check, "generalized");
  g.check = m.check;
  EXPECT_EQ(to_json(g).dump(), to_json(m).dump());
}

TEST(GeneralizedCheck, PlaneAndQuadricExamples) {
  auto s = spec_for(CheckKind::Generalized, "p2");
  s.partition = {{0}};
  s.s = {20.0};
  s.degree = 12;
  EXPECT_TRUE(check_generalized(s).pass);
  auto q = spec_for(CheckKind::Generalized, "p1xp1");
  q.partition = {{0, 1}};
  q.s = {20.0};
  q.degree = 12;
  EXPECT_TRUE(check_generalized(q).pass);
}

TEST(GeneralizedCheck, TotalSpaceSide) {
  auto s = spec_for(CheckKind::Generalized, "p2");
  s.partition = {{0}};
  s.s = {20.0};
  s.degree = 12;
  s.side = ISide::TotalSpace;
  const auto r = check_generalized(s);
  EXPECT_TRUE(r.pass) << to_json(r).dump(1);
}

TEST(GeneralizedCheck, InvalidPartitions) {
  auto s = spec_for(CheckKind::Generalized, "p2");
  s.partition = {{0}, {0}};
  s.s = {20.0};
  EXPECT_THROW(check_generalized(s), std::invalid_argument);
  auto b = spec_for(CheckKind::Generalized, "bl1p2");
  b.partition = {{1}};  // the exceptional divisor is not nef
  b.s = {20.0};
  EXPECT_THROW(check_generalized(b), NotNefError);
}

TEST(DhCheck, ExactExamples) {
  struct Case {
    const char* fan;
    std::vector<Rational> lambda;
    Rational expected;
  };
  for (const auto& c : {Case{"p2", {1, 1, 1}, Rational(9, 2)}, Case{"p1xp1", {1, 2, 1, 2}, Rational(9)}}) {
    auto s = spec_for(CheckKind::Dh, c.fan);
    s.lambda = c.lambda;
    const auto r = check_dh(s);
    EXPECT_TRUE(r.pass) << c.fan;
    EXPECT_EQ(r.points[0].kind, "exact");
    EXPECT_EQ(r.points[0].lhs.real(), to_double(c.expected)) << c.fan;
  }
  auto s = spec_for(CheckKind::Dh, "bl1p2");
  s.lambda = {1, 1, 1, 1};
  const auto r = check_dh(s);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.points[0].lhs, r.points[0].rhs);
}

TEST(DhCheck, AsymptoticGapShrinks) {
  auto s = spec_for(CheckKind::Dh, "p2");
  s.lambda = {1, 1, 1};
  s.s = {10.0, 20.0, 40.0};
  const auto r = check_dh(s);
  ASSERT_EQ(r.points.size(), 4u);
  EXPECT_GT(r.points[1].rel_err, r.points[2].rel_err);
  EXPECT_GT(r.points[2].rel_err, r.points[3].rel_err);
  s.s = {40.0, 10.0};
  EXPECT_FALSE(check_dh(s).pass);
}

TEST(GammaICheck, Examples) {
  for (const char* fan : {"p1", "p2"}) {
    auto s = spec_for(CheckKind::GammaI, fan);
    s.t = {10.0, 30.0, 100.0};
    const auto r = check_gamma_I(s);
    EXPECT_TRUE(r.pass) << fan;
    EXPECT_LT(r.points.back().lhs.real(), 0.05);
  }
  auto one = spec_for(CheckKind::GammaI, "p1");
  one.t = {10.0};
  const auto r = check_gamma_I(one);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(has_note(r, "vacuous"));
}

TEST(Report, StableFieldOrderAndTimings) {
  auto s = spec_for(CheckKind::MsGamma, "p1");
  s.z = {1.0};
  const auto r = check_ms_gamma(s);
  const auto j = to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"check", "fixture", "lambda", "pass", "provenance", "diagnostics", "points"}));
  std::vector<std::string> point_keys;
  for (auto it = j["points"][0].begin(); it != j["points"][0].end(); ++it) point_keys.push_back(it.key());
  EXPECT_EQ(point_keys.front(), "kind");
  EXPECT_EQ(point_keys.back(), "pass");
  EXPECT_FALSE(j["points"][0].contains("runtime_s"));
  EXPECT_TRUE(to_json(r, true)["points"][0].contains("runtime_s"));
  EXPECT_EQ(j.dump(), to_json(check_ms_gamma(s)).dump());
}

TEST(Report, Csv) {
  auto s = spec_for(CheckKind::MsGamma, "p1");
  s.z = {0.5, 1.0};
  const auto csv = to_csv({check_ms_gamma(s)});
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("check,fixture,kind,params", 0), 0u);
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
  EXPECT_NE(csv.find("z=0.5"), std::string::npos);
}

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() / ("mirrorgamma_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  const std::string cmd = std::string("\"") + MIRRORGAMMA_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(log);
  return r;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path out = fs::temp_directory_path() / ("mirrorgamma_r_" + std::to_string(::getpid()) + ".report");
  auto r = cli("check ms-gamma --fan p1.fan --lambda 0,0 --z 0.5,1,2 --degree 20 --tol 1e-6 --out \"" + out.string() + "\"");
  EXPECT_EQ(r.code, 0) << r.out;
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["check"], "ms-gamma");
  EXPECT_EQ(j["points"].size(), 3u);
  fs::remove(out);

  r = cli("check local --fan p1.fan --s 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("cycle empty: s ≤ T"), std::string::npos) << r.out;

  EXPECT_EQ(cli("check nonsense").code, 2);
  EXPECT_EQ(cli("check ms-gamma").code, 2);
  EXPECT_EQ(cli("check ms-gamma --fan p1.fan --bogus").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("check ms-gamma --fan does-not-exist.fan").code, 3);
  EXPECT_EQ(cli("check laplace --fan p1.fan --s=-1,-10").code, 0);
}

TEST(Cli, AllWritesReports) {
  const fs::path dir = fs::temp_directory_path() / ("mirrorgamma_fx_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  fs::copy_file(fixture("p1"), dir / "p1.fan", fs::copy_options::overwrite_existing);
  std::ofstream(dir / "p1.checks.json") << R"({"fan": "p1.fan", "checks": [
    {"check": "ms-gamma", "z": [1], "degree": 20, "tol": 1e-6},
    {"check": "dh", "lambda": [1, 1], "s": [10, 20]}]})";
  const auto r = cli("check all --fixtures \"" + dir.string() + "\" --out-dir \"" + (dir / "reports").string() + "\"");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "reports" / "p1.ms-gamma.report.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "p1.dh.report.json"));
  EXPECT_EQ(cli("check all --fixtures \"" + (dir / "missing").string() + "\"").code, 3);
  fs::remove_all(dir);
}
