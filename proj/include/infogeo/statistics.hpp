#pragma once

// Statistical manifolds as pair-groupoid contrast functions: finite parametric
// models, Bregman potentials, and the contrast built from a prescribed (g, T).

#include "infogeo/contrast.hpp"

#include <functional>
#include <string>
#include <vector>

namespace infogeo {

/// Finite sample space model theta -> (p(0|theta), ..., p(m-1|theta)).
struct ParametricModel {
  std::string name;
  int outcomes = 0;
  int dim = 0;
  Lifted<Vec, Vec> probabilities;
  /// Optional exact score d log p(x|theta) / d theta_j as an outcomes x dim matrix.
  Lifted<Vec, Mat> score;
  std::function<bool(const VectorXd&)> in_domain;
  std::string domain;
};

/// p = (theta, 1 - theta) on 0 < theta < 1.
ParametricModel binary_model();
/// p = (theta_1, theta_2, 1 - theta_1 - theta_2) on the open simplex.
ParametricModel categorical3_model();
/// "binary" or "categorical3"; throws DomainError otherwise.
ParametricModel find_model(const std::string& name);

enum class ScoreMethod { exact, finite_difference };

/// Step for finite-difference scores.
inline constexpr double kScoreStep = 1e-6;

/// outcomes x dim matrix of scores at theta; exact when available and requested.
MatrixXd score_matrix(const ParametricModel& model, const VectorXd& theta, ScoreMethod method = ScoreMethod::exact);

/// g_jk = sum_x p d_j log p d_k log p.
MatrixXd fisher_metric_sum(const ParametricModel& model, const VectorXd& theta,
                           ScoreMethod method = ScoreMethod::exact);
/// T_jkl = sum_x p d_j log p d_k log p d_l log p.
Tensor skewness_sum(const ParametricModel& model, const VectorXd& theta, ScoreMethod method = ScoreMethod::exact);
/// Lowered alpha-connection sum_x p (d_i d_j log p + (1 - alpha)/2 d_i log p d_j log p) d_k log p.
Tensor alpha_connection_sum(const ParametricModel& model, const VectorXd& theta, double alpha);

/// KL divergence sum_x p(x|a) log(p(x|a) / p(x|b)).
double kl_divergence(const ParametricModel& model, const VectorXd& a, const VectorXd& b);

/// F(zeta, xi) = KL(p(.|xi) || p(.|zeta)) on the pair groupoid of the chart; `reversed` swaps the slots.
ContrastFunction kl_contrast(const ParametricModel& model, bool reversed = false);

/// Strictly convex potential with its gradient, both jet-liftable.
struct Potential {
  std::string name;
  int dim = 0;
  Lifted<Vec, Scalar> psi;
  Lifted<Vec, Vec> grad;
  std::function<bool(const VectorXd&)> in_domain;
  std::string domain;
};

Potential quadratic_potential(int dim);
/// psi = theta^4 / 12 on theta > 0.
Potential quartic1d_potential();
/// psi = 1/2 theta.A.theta + 1/12 sum theta_i^4, A = [[2, 0.5], [0.5, 1]].
Potential quadquartic2d_potential();
/// Gaussian log-partition in natural coordinates, theta_2 < 0.
Potential gaussian_natural_potential();
/// "quartic1d", "quadquartic2d" or "gaussian-natural".
Potential find_potential(const std::string& name);

/// F(zeta, xi) = psi(xi) - psi(zeta) - <grad psi(zeta), xi - zeta>.
ContrastFunction bregman_contrast(const Potential& potential);

/// Symmetric tensor fields over a chart, components flattened row-major.
struct TensorFields {
  int dim = 0;
  Lifted<Vec, Mat> g;
  Lifted<Vec, Vec> t;
};

/// Fisher metric and skewness as jet-liftable fields (requires an exact score).
TensorFields model_tensor_fields(const ParametricModel& model);

/// F = 1/2 g(x) y y + 1/12 T(x) y y y with x the midpoint and y = source - target.
/// Symmetry of g and T is checked at each reference point (DomainError otherwise).
ContrastFunction build_contrast_from_tensors(const TensorFields& fields, const std::vector<VectorXd>& reference,
                                             std::string chart = {});

}  // namespace infogeo
