// geo: tensors, verification suites and scans for the registered scenarios.

#include "infogeo/harness.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace infogeo;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumeric = 3 };

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("geo");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("GEO_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("GEO_LOG='{}' is not a log level; keeping 'warn'", env);
    else
      spdlog::set_level(level);
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open output file '" + path + "'");
  out << text;
}

std::vector<double> default_alphas(std::vector<double> given) { return given.empty() ? kDefaultAlphas : given; }

struct Common {
  std::string method = "jet";
  std::string format;
  std::string out;
  std::uint32_t seed = 1;
  std::vector<double> alphas;
};

void add_common(CLI::App* cmd, Common& c, std::vector<std::string> formats, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--method", c.method, "Derivative method")->check(CLI::IsMember({"fd", "fd-richardson", "jet"}));
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember(std::move(formats)));
  cmd->add_option("--out", c.out, "Output path (default stdout)");
  cmd->add_option("--seed", c.seed, "Seed for sampled checks");
  cmd->add_option("--alpha", c.alphas, "Alpha value (repeatable)")->take_all();
}

int do_run(const std::string& scenario, const std::string& point, double tol, const Common& c) {
  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.alphas = default_alphas(c.alphas);
  cfg.method = parse_method(c.method);
  cfg.tol = tol;
  cfg.format = c.format;
  cfg.seed = c.seed;
  const Scenario s = make_scenario(scenario);
  const VectorXd x = point.empty() && s.reference_point.size() ? s.reference_point : parse_point(point);
  const RunResult r = run_scenario(s, x, cfg);
  const auto& d = r.diagnostics;
  for (const auto& [name, v] : {std::pair{"duality", d.duality}, {"torsion_F", d.torsion_F},
                                {"torsion_Fstar", d.torsion_Fstar}, {"metricity_LC", d.metricity_LC}})
    if (v && *v >= tol) spdlog::warn("{} residual {:.3e} exceeds --tol {:.1e}", name, *v, tol);
  if (c.format == "csv")
    emit(scan_csv(s, {ScanRow{x, r, {}}}), c.out);
  else
    emit(to_json(r).dump(2) + "\n", c.out);
  return r.degenerate ? kNumeric : kOk;
}

int do_verify(const std::string& suite, std::optional<double> tol, bool perturb, int samples, const Common& c) {
  VerifyOptions o;
  o.method = parse_method(c.method);
  o.seed = c.seed;
  o.tol = tol;
  o.alphas = default_alphas(c.alphas);
  o.perturb_dual = perturb;
  o.samples = samples;
  const auto checks = verify(suite, o);
  bool ok = true;
  std::ostringstream os;
  if (c.format == "json") {
    os << to_json(checks).dump(2) << "\n";
  } else if (c.format == "csv") {
    os << "suite,name,residual,tol,pass\n";
    for (const auto& k : checks)
      os << k.suite << ",\"" << k.name << "\"," << k.residual << ',' << k.tol << ',' << (k.pass ? "true" : "false")
         << "\n";
  } else {
    for (const auto& k : checks)
      os << (k.pass ? "PASS " : "FAIL ") << k.suite << ": " << k.name << "  residual=" << k.residual
         << " tol=" << k.tol << "\n";
  }
  int failed = 0;
  for (const auto& k : checks) failed += !k.pass;
  ok = failed == 0;
  if (c.format == "text") os << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  emit(os.str(), c.out);
  return ok ? kOk : kVerifyFailed;
}

int do_scan(const std::string& scenario, const std::vector<std::string>& points, const std::vector<std::string>& grid,
            int samples, int threads, const Common& c) {
  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.alphas = default_alphas(c.alphas);
  cfg.method = parse_method(c.method);
  cfg.format = c.format;
  cfg.seed = c.seed;
  const Scenario s = make_scenario(scenario);
  std::vector<VectorXd> xs;
  for (const auto& p : points) xs.push_back(parse_point(p));
  for (auto& p : grid_points(grid)) xs.push_back(std::move(p));
  std::mt19937 rng(c.seed);
  for (int k = 0; k < samples; ++k) xs.push_back(s.sample(rng));
  if (xs.empty()) throw CLI::ValidationError("scan", "give --point, --grid or --samples");
  const auto rows = scan(s, xs, cfg, threads);
  if (c.format == "json")
    emit(scan_json(rows).dump(2) + "\n", c.out);
  else
    emit(scan_csv(s, rows), c.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Dual connections and tensors of contrast functions on Lie groupoids"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* run = app.add_subcommand("run", "Tensors and connections at one point");
  Common run_c;
  std::string run_scenario_name, run_point;
  double run_tol = 1e-6;
  run->add_option("--scenario", run_scenario_name, "Scenario name")->required();
  run->add_option("--point", run_point, "Comma-separated coordinates (default: scenario reference point)");
  run->add_option("--tol", run_tol, "Warn when a diagnostic exceeds this")->check(CLI::PositiveNumber);
  add_common(run, run_c, {"json", "csv"}, "json");

  auto* ver = app.add_subcommand("verify", "Invariant suites; exit 1 if any residual exceeds its tolerance");
  Common ver_c;
  std::string suite = "all";
  std::optional<double> ver_tol;
  bool perturb = false;
  int ver_samples = 100;
  ver->add_option("suite", suite, "Suite")->check(CLI::IsMember(verify_suites()));
  ver->add_option("--tol", ver_tol, "Override every tolerance")->check(CLI::PositiveNumber);
  ver->add_option("--samples", ver_samples, "Samples per family in the axiom suite")->check(CLI::PositiveNumber);
  ver->add_flag("--perturb-dual", perturb, "Debug: perturb Gamma^F* before the duality checks");
  add_common(ver, ver_c, {"text", "json", "csv"}, "text");

  auto* sc = app.add_subcommand("scan", "Evaluate a scenario over many points");
  Common scan_c;
  std::string scan_scenario;
  std::vector<std::string> scan_points, grid;
  int scan_samples = 0, threads = 0;
  sc->add_option("--scenario", scan_scenario, "Scenario name")->required();
  sc->add_option("--point", scan_points, "Point (repeatable)")->take_all();
  sc->add_option("--grid", grid, "Axis start:stop:count (repeatable, Cartesian product)")->take_all();
  sc->add_option("--samples", scan_samples, "Random points from the scenario sampler");
  sc->add_option("--threads", threads, "Worker threads (default: hardware)");
  add_common(sc, scan_c, {"csv", "json"}, "csv");

  auto* list = app.add_subcommand("list", "Scenario names and verification suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return do_run(run_scenario_name, run_point, run_tol, run_c);
    if (*ver) return do_verify(suite, ver_tol, perturb, ver_samples, ver_c);
    if (*sc) return do_scan(scan_scenario, scan_points, grid, scan_samples, threads, scan_c);
    if (*list) {
      std::cout << "scenarios:";
      for (const auto& s : scenario_patterns()) std::cout << ' ' << s;
      std::cout << "\nsuites:";
      for (const auto& s : verify_suites()) std::cout << ' ' << s;
      std::cout << "\n";
      return kOk;
    }
  } catch (const CLI::Error& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const NumericError& e) {
    spdlog::error("{}", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kNumeric;
  }
  return kOk;
}
