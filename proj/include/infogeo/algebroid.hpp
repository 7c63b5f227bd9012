#pragma once

// Lie algebroid data resolved in a frame e_1..e_r over a chart of dimension d:
// anchor alpha(x) (d x r) and structure functions [e_i, e_j] = C^k_ij e_k.
// Coefficient derivatives along the anchor are central differences in the
// chart coordinates.

#include "infogeo/groupoid.hpp"
#include "infogeo/tensor.hpp"

#include <functional>
#include <string>
#include <vector>

namespace infogeo {

struct Frame {
  int rank = 0;
  int dim = 0;
  std::string chart_id;
  std::vector<std::string> labels;
  std::function<MatrixXd(const VectorXd&)> anchor;  // dim x rank
  std::function<Tensor(const VectorXd&)> structure;  // C(k, i, j)
};

/// Frame of the standard fiber basis of a groupoid family.
Frame standard_frame(const GroupoidFamily& family);

using MetricField = std::function<MatrixXd(const VectorXd&)>;

/// Gamma(k, i, j) with nabla_{e_i} e_j = Gamma^k_ij e_k.
struct ConnectionCoeffs {
  Tensor upper;

  /// Lowered coefficients L(i, j, k) = g(nabla_{e_i} e_j, e_k).
  Tensor lowered(const MatrixXd& g) const;
  static ConnectionCoeffs raise(const Tensor& lowered, const MatrixXd& g);
  /// nabla_X Y at a point for fiber values X, Y and dY = alpha(X)(Y) (coefficient derivative).
  VectorXd covariant(const VectorXd& X, const VectorXd& Y, const VectorXd& dY) const;
};

using ConnectionField = std::function<ConnectionCoeffs(const VectorXd&)>;

/// Rank and conditioning of a symmetric form; rank counts singular values above rel_tol * max.
struct MetricInfo {
  int rank = 0;
  double cond = 0.0;
  VectorXd singular_values;
};
MetricInfo metric_info(const MatrixXd& g, double rel_tol = 1e-8);

/// Thrown when an operation needs an invertible metric.
class DegenerateMetricError : public NumericError {
 public:
  DegenerateMetricError(int rank, int size, double cond);
  int rank;
  int size;
};

/// Throws DegenerateMetricError below full rank; warns when cond >= 1e8.
void require_metric(const MatrixXd& g);

inline constexpr double kCoefficientStep = 1e-4;

/// alpha(X) f at x, X a fiber vector at x.
double anchor_derivative(const Frame& frame, const VectorXd& X, const std::function<double(const VectorXd&)>& f,
                         const VectorXd& x, double h = kCoefficientStep);
/// alpha(X) applied to the coefficients of a section.
VectorXd anchor_derivative(const Frame& frame, const VectorXd& X, const Section& Y, const VectorXd& x,
                           double h = kCoefficientStep);

VectorXd bracket(const Frame& frame, const Section& X, const Section& Y, const VectorXd& x,
                 double h = kCoefficientStep);

ConnectionCoeffs koszul_levi_civita(const Frame& frame, const MetricField& g, const VectorXd& x,
                                    double h = kCoefficientStep);

/// Tor(k, i, j) = Gamma^k_ij - Gamma^k_ji - C^k_ij.
Tensor torsion(const Frame& frame, const ConnectionCoeffs& gamma, const VectorXd& x);

/// R(m, c, a, b): the e_m component of Curv(e_a, e_b) e_c.
Tensor curvature_tensor(const Frame& frame, const ConnectionField& gamma, const VectorXd& x, double h = 1e-4);
/// Curv(X, Y) as an r x r operator at x.
MatrixXd curvature(const Frame& frame, const ConnectionField& gamma, const Section& X, const Section& Y,
                   const VectorXd& x, double h = 1e-4);

/// max_ijk |alpha(e_i) g_jk - g(nabla_i e_j, e_k) - g(e_j, nabla_i e_k)|.
double metricity_residual(const Frame& frame, const MetricField& g, const ConnectionCoeffs& gamma, const VectorXd& x,
                          double h = kCoefficientStep);

/// |alpha(X) g(Y,Z) - g(nabla_X Y, Z) - g(Y, nabla*_X Z)| at x.
double dual_connection_check(const Frame& frame, const MetricField& g, const ConnectionCoeffs& gamma,
                             const ConnectionCoeffs& gamma_star, const VectorXd& x, const Section& X,
                             const Section& Y, const Section& Z, double h = kCoefficientStep);

/// Frame-basis version of dual_connection_check, maximized over all basis triples.
double duality_residual(const Frame& frame, const MetricField& g, const ConnectionCoeffs& gamma,
                        const ConnectionCoeffs& gamma_star, const VectorXd& x, double h = kCoefficientStep);

struct FrameResiduals {
  double antisymmetry = 0.0;
  double jacobi = 0.0;
  double anchor = 0.0;
};
/// Structure-function consistency: antisymmetry, Jacobi identity, anchor a Lie morphism.
FrameResiduals frame_residuals(const Frame& frame, const VectorXd& x, double h = kCoefficientStep);

}  // namespace infogeo
