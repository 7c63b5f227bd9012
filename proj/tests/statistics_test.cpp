#include "infogeo/statistics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace infogeo {
namespace {

constexpr std::uint32_t kSeed = 7321;

VectorXd v1(double a) { return VectorXd::Constant(1, a); }
VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

std::vector<VectorXd> binary_points() { return {v1(0.15), v1(0.3), v1(0.5), v1(0.62), v1(0.85)}; }
std::vector<VectorXd> categorical_points() {
  return {v2(0.2, 0.3), v2(0.1, 0.6), v2(0.33, 0.33), v2(0.5, 0.2), v2(0.7, 0.15)};
}

// Binary family in its natural parameter: p = (s, 1 - s), s = 1 / (1 + e^-theta).
ParametricModel binary_natural() {
  ParametricModel m;
  m.name = "binary-natural";
  m.outcomes = 2;
  m.dim = 1;
  m.probabilities = Lifted<Vec, Vec>([](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    using std::exp;
    const T s = T(1.0) / (T(1.0) + exp(-th[0]));
    Vec<T> p(2);
    p << s, T(1.0) - s;
    return p;
  });
  m.in_domain = [](const VectorXd&) { return true; };
  m.domain = "R";
  return m;
}

ConnectionField connection_field(const ContrastFunction& f, bool star) {
  const auto basis = standard_basis(*f.family);
  return [f, basis, star](const VectorXd& x) {
    const auto pair = connection_F(f, x, basis);
    return star ? pair.nabla_star : pair.nabla;
  };
}

MatrixXd fd_hessian(const Potential& p, const VectorXd& x, double h = 1e-4) {
  const int d = p.dim;
  MatrixXd out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto at = [&](double a, double b) {
        VectorXd y = x;
        y[i] += a;
        y[j] += b;
        return p.psi(y);
      };
      out(i, j) = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
    }
  return out;
}

TEST(StatisticsExamples, BinaryFisherAndSkewness) {
  const auto m = binary_model();
  EXPECT_NEAR(fisher_metric_sum(m, v1(0.5))(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(fisher_metric_sum(m, v1(0.25))(0, 0), 16.0 / 3.0, 1e-12);
  EXPECT_NEAR(fisher_metric_sum(m, v1(0.25), ScoreMethod::finite_difference)(0, 0), 16.0 / 3.0, 1e-8);
  EXPECT_NEAR(skewness_sum(m, v1(0.5))(0, 0, 0), 0.0, 1e-12);
  EXPECT_NEAR(skewness_sum(m, v1(0.3))(0, 0, 0), 1.0 / 0.09 - 1.0 / 0.49, 1e-12);
  EXPECT_THROW(fisher_metric_sum(m, v1(1.2)), DomainError);
  EXPECT_THROW(find_model("poisson"), DomainError);
}

TEST(StatisticsExamples, CategoricalFisherIsInverseCovarianceForm) {
  const auto m = categorical3_model();
  const VectorXd th = v2(0.2, 0.3);
  const double p3 = 0.5;
  MatrixXd expected(2, 2);
  expected << 1.0 / 0.2 + 1.0 / p3, 1.0 / p3, 1.0 / p3, 1.0 / 0.3 + 1.0 / p3;
  EXPECT_LT((fisher_metric_sum(m, th) - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((fisher_metric_sum(m, th, ScoreMethod::finite_difference) - expected).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT(skewness_sum(m, th).symmetry_residual(), 1e-12);
}

TEST(StatisticsExamples, ExponentialFamilySkewnessIsThirdCumulant) {
  const auto m = binary_natural();
  for (double th : {-1.3, 0.0, 0.4, 2.1}) {
    const double s = 1.0 / (1.0 + std::exp(-th));
    EXPECT_NEAR(fisher_metric_sum(m, v1(th), ScoreMethod::finite_difference)(0, 0), s * (1 - s), 1e-9);
    EXPECT_NEAR(skewness_sum(m, v1(th), ScoreMethod::finite_difference)(0, 0, 0), s * (1 - s) * (1 - 2 * s), 1e-9);
  }
}

TEST(StatisticsProperty, KullbackLeiblerReproducesFisherSkewnessAndAlphaConnections) {
  for (const auto& [model, points] :
       {std::pair{binary_model(), binary_points()}, std::pair{categorical3_model(), categorical_points()}}) {
    const auto f = kl_contrast(model);
    const auto basis = standard_basis(*f.family);
    for (const auto& th : points) {
      SCOPED_TRACE(model.name);
      const MatrixXd g = metric_gF(f, th, basis).as_matrix();
      EXPECT_LT((g - fisher_metric_sum(model, th)).cwiseAbs().maxCoeff(), 1e-5);
      EXPECT_LT(max_difference(skewness_TF(f, th, basis), skewness_sum(model, th)), 1e-5);
      const auto conn = connection_F(f, th, basis);
      EXPECT_LT(max_difference(conn.nabla.lowered(g), alpha_connection_sum(model, th, -1.0)), 1e-5);
      EXPECT_LT(max_difference(conn.nabla_star.lowered(g), alpha_connection_sum(model, th, 1.0)), 1e-5);
      EXPECT_LT(max_difference(metric_gF(f, th, basis, DiffMethod::central_fd_richardson),
                               metric_gF(f, th, basis)),
                1e-5);
    }
  }
}

TEST(StatisticsProperty, ReversedKullbackLeiblerNegatesSkewness) {
  const auto m = categorical3_model();
  const auto f = kl_contrast(m), r = kl_contrast(m, true);
  const auto basis = standard_basis(*f.family);
  for (const auto& th : categorical_points()) {
    EXPECT_LT(max_difference(metric_gF(r, th, basis), metric_gF(f, th, basis)), 1e-10);
    EXPECT_LT(max_difference(skewness_TF(r, th, basis), -1.0 * skewness_TF(f, th, basis)), 1e-10);
  }
}

TEST(StatisticsProperty, GibbsInequality) {
  const auto m = categorical3_model();
  std::mt19937 rng(kSeed);
  std::uniform_real_distribution<double> unif(0.02, 0.96);
  int checked = 0;
  while (checked < 200) {
    const VectorXd a = v2(unif(rng), unif(rng)), b = v2(unif(rng), unif(rng));
    if (!m.in_domain(a) || !m.in_domain(b)) continue;
    ++checked;
    EXPECT_GT(kl_divergence(m, a, b), 0.0);
    EXPECT_NEAR(kl_divergence(m, a, a), 0.0, 1e-15);
  }
  EXPECT_TRUE(validate_contrast(kl_contrast(m), {BasePoint{"categorical3", v2(0.2, 0.3)}}).pass);
}

TEST(StatisticsExamples, QuadraticBregmanIsEuclidean) {
  const auto f = bregman_contrast(quadratic_potential(2));
  const auto basis = standard_basis(*f.family);
  const VectorXd x = v2(0.3, -1.1);
  EXPECT_LT(max_difference(metric_gF(f, x, basis), Tensor::from_matrix(MatrixXd::Identity(2, 2))), 1e-13);
  EXPECT_LT(skewness_TF(f, x, basis).max_abs(), 1e-13);
  const Arrow<double> a = PairArrow<double>{v2(1.0, 2.0), v2(0.0, 0.5)};
  EXPECT_NEAR(f.evaluator(a), 0.5 * (1.0 + 2.25), 1e-14);
}

TEST(StatisticsExamples, QuarticBregmanIsFlatInItsChart) {
  const auto f = bregman_contrast(quartic1d_potential());
  const auto basis = standard_basis(*f.family);
  EXPECT_NEAR(metric_gF(f, v1(1.0), basis).data()[0], 1.0, 1e-13);
  EXPECT_NEAR(connection_F(f, v1(1.0), basis).nabla.upper.max_abs(), 0.0, 1e-13);
}

TEST(StatisticsProperty, BregmanContrastsAreDuallyFlat) {
  for (const auto& [name, points] :
       {std::pair{std::string("quartic1d"), std::vector<VectorXd>{v1(0.5), v1(1.0), v1(1.7)}},
        std::pair{std::string("quadquartic2d"), std::vector<VectorXd>{v2(0.1, 0.2), v2(-0.7, 0.4), v2(1.2, -0.9)}},
        std::pair{std::string("gaussian-natural"),
                  std::vector<VectorXd>{v2(0.0, -0.5), v2(1.0, -2.0), v2(-0.6, -0.8)}}}) {
    SCOPED_TRACE(name);
    const auto p = find_potential(name);
    const auto f = bregman_contrast(p);
    const auto basis = standard_basis(*f.family);
    const Frame frame = standard_frame(*f.family);
    for (const auto& x : points) {
      ASSERT_TRUE(p.in_domain(x));
      EXPECT_LT((metric_gF(f, x, basis).as_matrix() - fd_hessian(p, x)).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT(curvature_tensor(frame, connection_field(f, false), x).max_abs(), 1e-5);
      EXPECT_LT(curvature_tensor(frame, connection_field(f, true), x).max_abs(), 1e-5);
      EXPECT_TRUE(validate_contrast(f, {BasePoint{name, x}}).pass);
    }
  }
}

TEST(StatisticsExamples, BregmanSkewnessIsMinusThirdDerivative) {
  // psi = theta^4 / 12 has psi''' = 2 theta.
  const auto f = bregman_contrast(quartic1d_potential());
  EXPECT_NEAR(skewness_TF(f, v1(0.8), standard_basis(*f.family)).data()[0], -1.6, 1e-12);
}

TEST(StatisticsProperty, ContrastFromTensorsRoundTrip) {
  const auto m = binary_model();
  const auto fields = model_tensor_fields(m);
  const auto f = build_contrast_from_tensors(fields, binary_points());
  const auto basis = standard_basis(*f.family);
  for (const auto& th : binary_points()) {
    EXPECT_NEAR(metric_gF(f, th, basis).data()[0], fisher_metric_sum(m, th)(0, 0), 1e-6);
    EXPECT_NEAR(skewness_TF(f, th, basis).data()[0], skewness_sum(m, th)(0, 0, 0), 1e-6);
  }

  const auto cat = categorical3_model();
  const auto fc = build_contrast_from_tensors(model_tensor_fields(cat), categorical_points());
  for (const auto& th : categorical_points()) {
    EXPECT_LT((metric_gF(fc, th, standard_basis(*fc.family)).as_matrix() - fisher_metric_sum(cat, th))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-6);
    EXPECT_LT(max_difference(skewness_TF(fc, th, standard_basis(*fc.family)), skewness_sum(cat, th)), 1e-6);
  }

  // Constant T_111 = 6 is recovered exactly.
  TensorFields constant{1, Lifted<Vec, Mat>([](const auto& x) {
                          using T = typename std::decay_t<decltype(x)>::Scalar;
                          return Mat<T>::Identity(1, 1);
                        }),
                        Lifted<Vec, Vec>([](const auto& x) {
                          using T = typename std::decay_t<decltype(x)>::Scalar;
                          return Vec<T>::Constant(1, T(6.0));
                        })};
  const auto fk = build_contrast_from_tensors(constant, {v1(0.0)});
  EXPECT_NEAR(skewness_TF(fk, v1(0.4), standard_basis(*fk.family)).data()[0], 6.0, 1e-12);
}

TEST(StatisticsExamples, AsymmetricTensorsAreRejected) {
  TensorFields bad{2, Lifted<Vec, Mat>([](const auto& x) {
                     using T = typename std::decay_t<decltype(x)>::Scalar;
                     Mat<T> g(2, 2);
                     g << T(1.0), T(0.3), T(0.0), T(1.0);
                     return g;
                   }),
                   Lifted<Vec, Vec>([](const auto& x) {
                     using T = typename std::decay_t<decltype(x)>::Scalar;
                     return Vec<T>::Zero(8);
                   })};
  EXPECT_THROW(build_contrast_from_tensors(bad, {v2(0.0, 0.0)}), DomainError);

  TensorFields bad_t{1, bad.g, bad.t};
  bad_t.dim = 2;
  bad_t.g = Lifted<Vec, Mat>([](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    return Mat<T>::Identity(2, 2);
  });
  bad_t.t = Lifted<Vec, Vec>([](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    Vec<T> t = Vec<T>::Zero(8);
    t[1] = T(1.0);  // T_001 without T_010
    return t;
  });
  EXPECT_THROW(build_contrast_from_tensors(bad_t, {v2(0.0, 0.0)}), DomainError);
}

}  // namespace
}  // namespace infogeo
