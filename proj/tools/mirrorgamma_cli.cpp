// mirrorgamma: run the numerical checks and write reports.
//
//   mirrorgamma check ms-gamma --fan p1.fan --lambda 0,0 --z 0.5,1,2 --degree 20 --tol 1e-6 --out r.report
//   mirrorgamma check all --fixtures fixtures/ --out-dir reports/
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 I/O error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mirrorgamma/harness/checks.hpp"

namespace fs = std::filesystem;
using namespace mirrorgamma;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kIo = 3 };

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* flag) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) throw SpecError(std::string("bad value '") + tok + "' for " + flag);
    out.push_back(v);
  }
  if (out.empty()) throw SpecError(std::string(flag) + " needs at least one value");
  return out;
}

struct Options {
  std::string check;
  std::string fan, lambda, z, s, t, partition, side, method;
  std::optional<int> degree;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool fixed_degree = false;
  bool timings = false;
  std::string out, csv, out_dir;
  std::string fixtures = MIRRORGAMMA_FIXTURE_DIR;
};

fs::path resolve_fan(const Options& o) {
  fs::path p = o.fan;
  if (fs::exists(p)) return p;
  if (p.is_relative() && fs::exists(fs::path(o.fixtures) / p)) return fs::path(o.fixtures) / p;
  throw IoFailure("cannot read fan file " + o.fan);
}

CheckSpec build_spec(const Options& o, CheckKind kind) {
  const fs::path fan = resolve_fan(o);
  CheckSpec spec = default_spec(kind);
  const fs::path config = config_for(fan);
  if (fs::exists(config))
    for (const auto& c : load_config(config))
      if (c.kind == kind) {
        spec = c;
        break;
      }
  spec.fan = fan;
  if (!o.lambda.empty()) {
    spec.lambda.clear();
    for (const auto& tok : split(o.lambda, ',')) spec.lambda.push_back(parse_lambda_entry(tok));
  }
  if (!o.z.empty()) spec.z = parse_doubles(o.z, "--z");
  if (!o.s.empty()) spec.s = parse_doubles(o.s, "--s");
  if (!o.t.empty()) spec.t = parse_doubles(o.t, "--t");
  if (o.degree) spec.degree = *o.degree;
  if (o.tol) spec.tol = *o.tol;
  if (o.seed) spec.seed = *o.seed;
  if (!o.method.empty()) spec.method = o.method == "mc" ? IntegralMethod::MonteCarlo : IntegralMethod::Quadrature;
  if (!o.partition.empty()) spec.partition = parse_partition(o.partition);
  if (!o.side.empty()) spec.side = o.side == "total-space" ? ISide::TotalSpace : ISide::Section;
  if (o.fixed_degree) spec.extend_truncation = false;
  spec.validate();
  return spec;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out || !(out << text) || !out.flush()) throw IoFailure("cannot write " + path.string());
}

void print_summary(const std::vector<CheckReport>& reports) {
  std::cout << std::left << std::setw(15) << "check" << std::setw(10) << "fixture" << std::right << std::setw(7) << "points"
            << std::setw(14) << "worst err" << "  status\n";
  for (const auto& r : reports) {
    std::ostringstream err;
    err << std::scientific << std::setprecision(2) << r.worst_rel_err();
    std::cout << std::left << std::setw(15) << r.check << std::setw(10) << r.fixture << std::right << std::setw(7)
              << r.points.size() << std::setw(14) << err.str() << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
    for (const auto& d : r.diagnostics) std::cerr << r.check << " " << r.fixture << ": " << d << '\n';
    for (const auto& p : r.points)
      for (const auto& n : p.notes)
        if (n.rfind("error", 0) != 0) std::cerr << r.check << " " << r.fixture << ": " << n << '\n';
  }
}

int run(const Options& o) {
  std::vector<CheckReport> reports;
  if (o.check == "all") {
    const auto specs = load_fixture_configs(o.fixtures);
    if (specs.empty()) throw IoFailure("no *.checks.json files in " + o.fixtures);
    std::vector<CheckSpec> adjusted = specs;
    for (auto& s : adjusted) {
      if (o.seed) s.seed = *o.seed;
      if (!o.method.empty()) s.method = o.method == "mc" ? IntegralMethod::MonteCarlo : IntegralMethod::Quadrature;
      if (o.fixed_degree) s.extend_truncation = false;
    }
    reports = run_checks(adjusted);
    if (!o.out_dir.empty()) {
      std::map<std::string, int> seen;
      for (const auto& r : reports) {
        const std::string base = r.fixture + "." + r.check;
        const int k = seen[base]++;
        const std::string name = k == 0 ? base : base + "." + std::to_string(k);
        write_file(fs::path(o.out_dir) / (name + ".report.json"), to_json(r, o.timings).dump(2) + "\n");
      }
    }
  } else {
    const auto kind = parse_check_kind(o.check);
    if (!kind) throw SpecError("unknown check '" + o.check + "'");
    if (o.fan.empty()) throw SpecError("--fan is required for check " + o.check);
    reports.push_back(run_check(build_spec(o, *kind)));
  }
  if (!o.out.empty()) {
    ordered_json j;
    if (reports.size() == 1) {
      j = to_json(reports[0], o.timings);
    } else {
      j = ordered_json::array();
      for (const auto& r : reports) j.push_back(to_json(r, o.timings));
    }
    write_file(o.out, j.dump(2) + "\n");
  }
  if (!o.csv.empty()) write_file(o.csv, to_csv(reports));
  print_summary(reports);
  for (const auto& r : reports)
    if (!r.pass) return kFail;
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of the mirror-symmetric Gamma identities for toric Fano varieties"};
  app.require_subcommand(1);
  Options o;
  auto* check = app.add_subcommand("check", "run a named check, or every configured check with 'all'");
  std::vector<std::string> names;
  for (const auto& [kind, name] : check_names()) names.emplace_back(name);
  names.emplace_back("all");
  check->add_option("name", o.check, "check to run")->required()->check(CLI::IsMember(names));
  check->add_option("--fan", o.fan, "fan file (relative paths also resolve against --fixtures)");
  check->add_option("--lambda", o.lambda, "comma-separated lambda, entries as p/q, decimals or ln(x)");
  check->add_option("--z", o.z, "comma-separated z grid");
  check->add_option("--s", o.s, "comma-separated s grid (dh: exponents m of the levels e^m); use --s=-1,-10 for negatives");
  check->add_option("--t", o.t, "comma-separated t grid for gamma-i");
  check->add_option("--degree", o.degree, "series truncation N (bound on c1.d)")->check(CLI::NonNegativeNumber);
  check->add_option("--tol", o.tol, "relative tolerance (gamma-i: final angle threshold)")->check(CLI::PositiveNumber);
  check->add_option("--method", o.method, "integral method override")->check(CLI::IsMember({"quad", "mc"}));
  check->add_option("--seed", o.seed, "root seed for Monte Carlo");
  check->add_option("--partition", o.partition, "nef partition as ray lists, e.g. 0,1;2,3");
  check->add_option("--side", o.side, "generalized check side")->check(CLI::IsMember({"section", "total-space"}));
  check->add_flag("--fixed-degree", o.fixed_degree, "do not extend the truncation when the series tail is above tol");
  check->add_option("--out", o.out, "JSON report file");
  check->add_option("--csv", o.csv, "per-point CSV file");
  check->add_option("--fixtures", o.fixtures, "fixture directory for 'all' and for relative --fan");
  check->add_option("--out-dir", o.out_dir, "directory for per-check reports of 'all'");
  check->add_flag("--timings", o.timings, "include per-point runtimes in reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return run(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoFailure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const FanError& e) {
    std::cerr << "I/O error: malformed fan: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kFail;
  }
}
