#pragma once

// Contrast functions on a groupoid and the tensors they induce at the units,
// all obtained as invariant-field derivatives realized by probe arrows.

#include "infogeo/algebroid.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace infogeo {

struct ContrastFunction {
  std::shared_ptr<const GroupoidFamily> family;
  ArrowFunction evaluator;
  int degree = 1;
  bool nonneg = false;
  std::string name;
};

ContrastFunction make_contrast(GroupoidFamily family, ArrowFunction f, int degree = 1, bool nonneg = false,
                               std::string name = {});

/// F* = F o inv.
ContrastFunction pullback_inverse(const ContrastFunction& f);

/// a F + b F* on the same family.
ArrowFunction combine(const ContrastFunction& f, double a, double b);

/// Constant sections e_1..e_r of the family's standard basis.
std::vector<Section> standard_basis(const GroupoidFamily& family);

struct ValidationReport {
  double unit_value = 0.0;
  /// jet_norms[m-1]: max |probe derivative| over left-only probes of order m.
  std::vector<double> jet_norms;
  bool nonneg_checked = false;
  double min_value = 0.0;
  int samples = 0;
  bool pass = false;

  std::string summary() const;
};

ValidationReport validate_contrast(const ContrastFunction& f, const std::vector<BasePoint>& samples,
                                   std::uint32_t seed = 1, double tol = 1e-7);

/// Mixed derivative X_1^L..X_p^L Z_1^R..Z_q^R of `fn` at the unit over x.
double probe_derivative(const ContrastFunction& f, const ArrowFunction& fn, const VectorXd& x,
                        std::vector<Section> lefts, std::vector<Section> rights,
                        DiffMethod method = DiffMethod::taylor_jet);

/// Tensor of order p + q: entry (i_1..i_p, j_1..j_q) is e_i^L..e_i^L e_j^R..e_j^R fn at x.
Tensor probe_tensor(const ContrastFunction& f, const ArrowFunction& fn, const VectorXd& x,
                    const std::vector<Section>& basis, int lefts, int rights,
                    DiffMethod method = DiffMethod::taylor_jet);

/// g^F(e_a, e_b) = e_a^L e_b^L F.
Tensor metric_gF(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis,
                 DiffMethod method = DiffMethod::taylor_jet);

struct MetricVariants {
  Tensor ll, lr, rr;
};
MetricVariants metric_variants(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis,
                               DiffMethod method = DiffMethod::taylor_jet);

/// The metric as a field over base points, for Koszul and duality checks.
MetricField metric_field(const ContrastFunction& f, const std::vector<Section>& basis,
                         DiffMethod method = DiffMethod::taylor_jet);

/// T^F = e^L e^L e^L (F - F*).
Tensor skewness_TF(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis,
                   DiffMethod method = DiffMethod::taylor_jet);

/// Largest change of g^F on a pair groupoid when each probe direction is shifted
/// by a random tangent-to-diagonal vector.
double extension_independence_residual(const ContrastFunction& f, const VectorXd& x, std::uint32_t seed,
                                       int trials = 4, DiffMethod method = DiffMethod::taylor_jet);

struct DualPair {
  ConnectionCoeffs nabla;       // from F
  ConnectionCoeffs nabla_star;  // from F*
};

/// Solves g(nabla_{e_i} e_j, e_k) = e_i^L e_j^L e_k^R F (and the same for F*).
DualPair connection_F(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis,
                      DiffMethod method = DiffMethod::taylor_jet);

/// Lowered Gamma^alpha = Gamma^LC - (alpha/2) T, raised with g.
ConnectionCoeffs alpha_connection(const ConnectionCoeffs& levi_civita, const MatrixXd& g, const Tensor& t,
                                  double alpha);
ConnectionCoeffs alpha_connection(const Frame& frame, const MetricField& g, const Tensor& t, double alpha,
                                  const VectorXd& x);

inline const std::vector<double> kDefaultAlphas = {-1.0, -0.5, 0.0, 0.5, 1.0};

struct HigherTensors {
  Tensor g;  // order k + 1
  Tensor t;  // order k + 2
};

/// g_{k+1} = L^{k+1} F and T_{k+2} = L^{k+2} (F + (-1)^k F*), k in {1, 2}.
HigherTensors higher_tensors(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis, int k,
                             DiffMethod method = DiffMethod::taylor_jet);

/// H_{k+2} = L^{k+1} R F (last slot a right probe), k in {1, 2}.
Tensor higher_H(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis, int k,
                DiffMethod method = DiffMethod::taylor_jet);

/// H^g_{k+2} = (1/2) L^{k+1} R (F - (-1)^k F*).
Tensor higher_Hg(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis, int k,
                 DiffMethod method = DiffMethod::taylor_jet);

}  // namespace infogeo
