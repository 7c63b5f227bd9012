#pragma once

// Scenario registry, single-point runs, verification suites and parameter scans
// behind the geo command line tool.

#include "infogeo/reduction.hpp"
#include "infogeo/statistics.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace infogeo {

inline constexpr const char* kVersion = "0.1.0";

/// A named contrast with the frame in which its tensors are reported.
struct Scenario {
  std::string name;
  std::string chart;
  ContrastFunction contrast;
  /// Frame the tensors live in (total family frame, or the quotient frame).
  std::optional<Frame> frame;
  std::vector<std::string> labels;
  VectorXd reference_point;
  /// Throws DomainError outside the scenario's domain.
  std::function<void(const VectorXd&)> check_point;
  std::function<VectorXd(std::mt19937&)> sample;
  /// Set for scenarios reported on a quotient.
  std::optional<ReducedScenario> reduced;
  bool pair_groupoid = false;
};

/// Names accepted by make_scenario, with `n`/`d` placeholders.
std::vector<std::string> scenario_patterns();
/// Concrete scenarios exercised by `verify` and the acceptance run.
std::vector<std::string> registered_scenarios();
/// Throws DomainError for unknown names or parameters out of range.
Scenario make_scenario(const std::string& name);

/// "0.1,0.2" -> (0.1, 0.2); the empty string is the empty point.
VectorXd parse_point(const std::string& text);

struct RunConfig {
  std::string scenario;
  /// Empty means the scenario's reference point.
  std::vector<VectorXd> points;
  std::vector<double> alphas = kDefaultAlphas;
  DiffMethod method = DiffMethod::taylor_jet;
  double tol = 1e-6;
  std::string format = "json";
  std::string out;
  std::uint32_t seed = 1;
};

struct Diagnostics {
  double g_symmetry = 0.0;
  double t_symmetry = 0.0;
  /// Unset when g is degenerate.
  std::optional<double> duality, torsion_F, torsion_Fstar, metricity_LC;
  int g_rank = 0;
  double g_cond = 0.0;
};

struct RunResult {
  std::string scenario;
  std::string chart;
  VectorXd point;
  std::vector<std::string> frame;
  std::vector<double> alpha;
  Tensor g;
  Tensor t;
  std::optional<ConnectionCoeffs> gamma_F, gamma_Fstar, gamma_LC;
  std::vector<ConnectionCoeffs> alpha_connections;
  Diagnostics diagnostics;
  std::uint32_t seed = 0;
  std::string method;
  bool degenerate = false;
};

/// Tensors, connections and diagnostics at one point. A degenerate metric gives a
/// partial result (no connections) with `degenerate` set.
RunResult run_scenario(const Scenario& s, const VectorXd& point, const RunConfig& config);
RunResult run_scenario(const RunConfig& config);

nlohmann::ordered_json to_json(const RunResult& r);

// ---------------------------------------------------------------------------
// Verification

struct CheckResult {
  std::string suite;
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  DiffMethod method = DiffMethod::taylor_jet;
  std::uint32_t seed = 1;
  /// Replaces every per-check tolerance when set.
  std::optional<double> tol;
  std::vector<double> alphas = kDefaultAlphas;
  /// Negative control: perturbs Gamma^F* before the duality checks.
  bool perturb_dual = false;
  int samples = 100;
};

std::vector<std::string> verify_suites();
/// Runs one suite ("all" runs every suite). Throws DomainError for unknown names.
std::vector<CheckResult> verify(const std::string& suite, const VerifyOptions& options);

nlohmann::ordered_json to_json(const std::vector<CheckResult>& checks);

// ---------------------------------------------------------------------------
// Scans

struct ScanRow {
  VectorXd point;
  std::optional<RunResult> result;
  std::string error;
};

/// Evaluates every point (in parallel when threads > 1); rows keep input order.
std::vector<ScanRow> scan(const Scenario& s, const std::vector<VectorXd>& points, const RunConfig& config,
                          int threads = 0);

/// Cartesian grid from per-axis "start:stop:count" specs.
std::vector<VectorXd> grid_points(const std::vector<std::string>& axes);

std::string scan_csv(const Scenario& s, const std::vector<ScanRow>& rows);
nlohmann::ordered_json scan_json(const std::vector<ScanRow>& rows);

}  // namespace infogeo
