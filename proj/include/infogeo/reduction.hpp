#pragma once

// Reduction of invariant contrast functions along a group action. Quotients are
// never charted; reduced tensors are probe derivatives along invariant frames
// evaluated at a lift of the quotient point.

#include "infogeo/contrast.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace infogeo {

/// Right action of a group on arrows. Group elements are stored as matrices.
struct GroupAction {
  std::string name;
  std::function<MatrixXd(std::mt19937&)> sample_element;
  std::function<Arrow<double>(const Arrow<double>&, const MatrixXd&)> act;
};

/// A -> g^-1 A g on matrix-group arrows, g drawn from `acting`.
GroupAction conjugation_action(const MatrixGroup& acting, double scale = 0.7);

struct InvarianceReport {
  double max_deviation = 0.0;
  int evaluations = 0;
  bool pass = false;
};

/// max |F(a.g) - F(a)| over the arrows and `per_arrow` sampled group elements each.
InvarianceReport check_invariance(const ContrastFunction& f, const GroupAction& action,
                                  const std::vector<Arrow<double>>& arrows, std::uint32_t seed,
                                  int per_arrow = 4, double tol = 1e-9);

struct ReducedScenario {
  std::string name;
  std::string quotient_chart;
  ContrastFunction contrast;  // on the total groupoid
  GroupAction action;
  /// Total base point over a quotient point; `fiber` selects the lift.
  std::function<VectorXd(const VectorXd& x0, const MatrixXd& fiber)> lift;
  /// Identity fiber element.
  MatrixXd fiber_identity;
  /// Invariant frame of the quotient algebroid, as sections upstairs.
  std::function<std::vector<Section>(const VectorXd& x0, const MatrixXd& fiber)> frame_sections;
  std::vector<std::string> labels;
  /// Quotient frame with anchor and structure functions, when the frame is global.
  std::optional<Frame> quotient_frame;
  VectorXd reference_point;
};

struct ReducedTensors {
  VectorXd lift;
  Tensor g;
  Tensor t;
  MetricInfo info;
  std::optional<DualPair> connections;
};

/// Reduced g, T (and the dual pair when g is nondegenerate) at the lift of x0.
/// Throws DomainError if a sampled invariance check fails.
ReducedTensors reduce_tensors(const ReducedScenario& s, const VectorXd& x0, const MatrixXd& fiber,
                              DiffMethod method = DiffMethod::taylor_jet);
ReducedTensors reduce_tensors(const ReducedScenario& s, const VectorXd& x0,
                              DiffMethod method = DiffMethod::taylor_jet);

/// max entrywise difference of reduced g and T over `lifts` random lifts of x0.
double lift_independence_residual(const ReducedScenario& s, const VectorXd& x0, std::uint32_t seed, int lifts = 3,
                                  DiffMethod method = DiffMethod::taylor_jet);

/// Reduced metric as a field over quotient points (used for Koszul on the quotient frame).
MetricField reduced_metric_field(const ReducedScenario& s, DiffMethod method = DiffMethod::taylor_jet);

/// S^n = SO(n+1)/SO(n): pair groupoid over SO(n+1), F = 1/4 tr(2I - A - A^t) with A = p^t p'.
ReducedScenario sphere_scenario(int n);

/// Point of S^n -> rotation with that first column (Householder completion, det +1).
MatrixXd sphere_section(const VectorXd& x);

/// CP^{n-1}: pair groupoid on R^{2n} = C^n \ {0} with F = 1 - |<phi, psi>|^2 / (|phi|^2 |psi|^2).
ReducedScenario fubini_study_scenario(int n);

/// Multiplication by i on R^{2n} in [re, im] layout.
MatrixXd complex_structure(int n);

}  // namespace infogeo
