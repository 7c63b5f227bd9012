#include "infogeo/reduction.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace infogeo {
namespace {

constexpr std::uint32_t kSeed = 5581;

ArrowFunction trace_contrast() {
  return ArrowFunction([](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const Mat<T>& m = std::get<MatrixArrow<T>>(a).value;
    const Mat<T> d = Mat<T>::Identity(m.rows(), m.cols()) - m;
    return frobenius(d, d);
  });
}

std::vector<Arrow<double>> arrows_of(const GroupoidFamily& fam, int count, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<Arrow<double>> out;
  for (int k = 0; k < count; ++k) out.push_back(sample_arrow(fam, rng));
  return out;
}

VectorXd random_unit(int m, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  VectorXd v(m);
  for (auto& c : v) c = normal(rng);
  return v.normalized();
}

double max_abs(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

TEST(ReductionExamples, ConjugationControl) {
  const auto gl = make_contrast(MatrixGroup(GroupKind::GL, 2), trace_contrast());
  const auto arrows = arrows_of(*gl.family, 10, kSeed);
  const auto bad = check_invariance(gl, conjugation_action(MatrixGroup(GroupKind::GL, 2)), arrows, kSeed);
  EXPECT_FALSE(bad.pass);
  EXPECT_GT(bad.max_deviation, 1e-3);

  const auto so = make_contrast(MatrixGroup(GroupKind::SO, 3), trace_contrast());
  const auto good =
      check_invariance(so, conjugation_action(MatrixGroup(GroupKind::SO, 3)), arrows_of(*so.family, 10, kSeed), kSeed);
  EXPECT_TRUE(good.pass) << good.max_deviation;
}

TEST(ReductionExamples, SphereSection) {
  std::mt19937 rng(kSeed);
  for (int k = 0; k < 20; ++k) {
    const VectorXd x = random_unit(4, rng);
    const MatrixXd q = sphere_section(x);
    EXPECT_LT(max_abs(q.col(0) - x), 1e-14);
    EXPECT_LT(max_abs(q.transpose() * q - MatrixXd::Identity(4, 4)), 1e-14);
    EXPECT_NEAR(q.determinant(), 1.0, 1e-13);
  }
  EXPECT_LT(max_abs(sphere_section(VectorXd::Unit(3, 0)) - MatrixXd::Identity(3, 3)), 1e-15);
  EXPECT_THROW(sphere_section(VectorXd::Zero(3)), DomainError);
}

class SphereTest : public ::testing::TestWithParam<int> {};

TEST_P(SphereTest, InvarianceAndContrastAxioms) {
  const auto s = sphere_scenario(GetParam());
  const auto rep = check_invariance(s.contrast, s.action, arrows_of(*s.contrast.family, 50, kSeed), kSeed);
  EXPECT_TRUE(rep.pass) << rep.max_deviation;
  std::mt19937 rng(kSeed);
  std::vector<BasePoint> pts;
  for (int k = 0; k < 3; ++k) pts.push_back(BasePoint{chart_id(*s.contrast.family), sample_point(*s.contrast.family, rng)});
  const auto v = validate_contrast(s.contrast, pts);
  EXPECT_TRUE(v.pass) << v.summary();
}

TEST_P(SphereTest, TotalMetricIsHalfTraceForm) {
  const int n = GetParam();
  const auto s = sphere_scenario(n);
  const MatrixGroup big(GroupKind::SO, n + 1);
  std::mt19937 rng(kSeed + 1);
  const VectorXd p = sample_point(*s.contrast.family, rng);
  const MatrixXd g = metric_gF(s.contrast, p, standard_basis(*s.contrast.family)).as_matrix();
  const auto& b = big.basis();
  MatrixXd oracle(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) oracle(i, j) = 0.5 * (b[i] * b[j].transpose()).trace();
  EXPECT_LT(max_abs(g - oracle), 1e-10);

  // Ad-invariance: g(Ad X, Ad Y) = g(X, Y).
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixXd gamma = big.random_element(rng);
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        const VectorXd ai = big.coordinates(gamma * b[i] * gamma.transpose());
        const VectorXd aj = big.coordinates(gamma * b[j] * gamma.transpose());
        const double v = probe_derivative(s.contrast, s.contrast.evaluator, p,
                                          {constant_section(ai), constant_section(aj)}, {});
        EXPECT_NEAR(v, oracle(i, j), 1e-9);
      }
  }
}

TEST_P(SphereTest, ReducedTensorsAreRoundAndLiftIndependent) {
  const int n = GetParam();
  const auto s = sphere_scenario(n);
  std::mt19937 rng(kSeed + 2);
  for (int trial = 0; trial < 3; ++trial) {
    const VectorXd x0 = trial == 0 ? s.reference_point : random_unit(n + 1, rng);
    const auto red = reduce_tensors(s, x0);
    const int r = red.g.dim();
    EXPECT_LT(max_abs(red.g.as_matrix() - MatrixXd::Identity(r, r)), 1e-10);
    EXPECT_LT(red.t.max_abs(), 1e-7);
    EXPECT_LT(lift_independence_residual(s, x0, kSeed + trial), 1e-6);
  }
}

TEST_P(SphereTest, InvariantSectionsAreTensorialForMetric) {
  const auto s = sphere_scenario(GetParam());
  std::mt19937 rng(kSeed + 3);
  const VectorXd x0 = random_unit(GetParam() + 1, rng);
  const VectorXd p = s.lift(x0, s.fiber_identity);
  const auto sections = s.frame_sections(x0, s.fiber_identity);
  std::vector<Section> frozen;
  for (const auto& sec : sections) frozen.push_back(constant_section(sec(p)));
  EXPECT_LT(max_difference(metric_gF(s.contrast, p, sections), metric_gF(s.contrast, p, frozen)), 1e-10);
  EXPECT_LT(max_difference(skewness_TF(s.contrast, p, sections), skewness_TF(s.contrast, p, frozen)), 1e-10);
}

TEST_P(SphereTest, QuotientLeviCivita) {
  const int n = GetParam();
  const auto s = sphere_scenario(n);
  ASSERT_TRUE(s.quotient_frame.has_value());
  const Frame& frame = *s.quotient_frame;
  const MatrixGroup big(GroupKind::SO, n + 1);
  const auto& sc = big.structure_constants();
  std::mt19937 rng(kSeed + 4);
  const VectorXd x0 = random_unit(n + 1, rng);

  const auto res = frame_residuals(frame, x0);
  EXPECT_LT(res.antisymmetry, 1e-12);
  EXPECT_LT(res.jacobi, 1e-9);
  EXPECT_LT(res.anchor, 1e-6);

  const auto red = reduce_tensors(s, x0);
  ASSERT_TRUE(red.connections.has_value());
  const auto& conn = *red.connections;
  double err = 0.0;
  for (int k = 0; k < frame.rank; ++k)
    for (int i = 0; i < frame.rank; ++i)
      for (int j = 0; j < frame.rank; ++j) err = std::max(err, std::abs(conn.nabla.upper(k, i, j) + 0.5 * sc[k](i, j)));
  EXPECT_LT(err, 1e-9);
  EXPECT_LT(max_difference(conn.nabla.upper, conn.nabla_star.upper), 1e-9);

  const MetricField g = reduced_metric_field(s);
  EXPECT_LT(torsion(frame, conn.nabla, x0).max_abs(), 1e-6);
  EXPECT_LT(metricity_residual(frame, g, conn.nabla, x0), 1e-6);
  EXPECT_LT(max_difference(koszul_levi_civita(frame, g, x0).upper, conn.nabla.upper), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Dimensions, SphereTest, ::testing::Values(2, 3));

class FubiniStudyTest : public ::testing::TestWithParam<int> {};

TEST_P(FubiniStudyTest, InvarianceAndKernel) {
  const int n = GetParam();
  const auto s = fubini_study_scenario(n);
  const auto rep = check_invariance(s.contrast, s.action, arrows_of(*s.contrast.family, 50, kSeed), kSeed);
  EXPECT_TRUE(rep.pass) << rep.max_deviation;

  const VectorXd phi = VectorXd::Unit(2 * n, 0);
  const MatrixXd g = metric_gF(s.contrast, phi, standard_basis(*s.contrast.family)).as_matrix();
  const MatrixXd j = complex_structure(n);
  EXPECT_NEAR(g(1, 1), 2.0, 1e-10);  // x = y = e_2
  EXPECT_NEAR(g(0, 0), 0.0, 1e-10);  // along phi
  EXPECT_NEAR(g(n, n), 0.0, 1e-10);  // along i phi
  EXPECT_LT(max_abs(g * phi), 1e-10);
  EXPECT_LT(max_abs(g * (j * phi)), 1e-10);
  EXPECT_EQ(metric_info(g).rank, 2 * n - 2);
}

TEST_P(FubiniStudyTest, ComplementMetricIsScaledRealPart) {
  const int n = GetParam();
  const auto s = fubini_study_scenario(n);
  const MatrixXd j = complex_structure(n);
  std::mt19937 rng(kSeed + 5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd phi(2 * n);
    for (auto& c : phi) c = normal(rng);
    const MatrixXd g = metric_gF(s.contrast, phi, standard_basis(*s.contrast.family)).as_matrix();
    // Real projector onto the complement of span{phi, i phi}.
    MatrixXd basis(2 * n, 2);
    basis << phi, j * phi;
    const MatrixXd proj = MatrixXd::Identity(2 * n, 2 * n) - basis * (basis.transpose() * basis).inverse() * basis.transpose();
    VectorXd x(2 * n), y(2 * n);
    for (auto& c : x) c = normal(rng);
    for (auto& c : y) c = normal(rng);
    x = proj * x;
    y = proj * y;
    EXPECT_NEAR(x.dot(g * y), 2.0 / phi.squaredNorm() * x.dot(y), 1e-10);
  }
}

TEST_P(FubiniStudyTest, ProjectiveReduction) {
  const int n = GetParam();
  const auto s = fubini_study_scenario(n);
  const auto red = reduce_tensors(s, s.reference_point);
  EXPECT_LT(max_abs(red.g.as_matrix() - 2.0 * MatrixXd::Identity(2 * n - 2, 2 * n - 2)), 1e-10);
  EXPECT_LT(red.t.max_abs(), 1e-10);
  EXPECT_EQ(red.info.rank, 2 * n - 2);

  std::mt19937 rng(kSeed + 6);
  std::normal_distribution<double> normal;
  VectorXd x0(2 * n);
  for (auto& c : x0) c = normal(rng);
  const auto other = reduce_tensors(s, x0);
  EXPECT_LT(max_abs(other.g.as_matrix() - 2.0 / x0.squaredNorm() * MatrixXd::Identity(2 * n - 2, 2 * n - 2)), 1e-10);
  EXPECT_LT(lift_independence_residual(s, x0, kSeed), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Dimensions, FubiniStudyTest, ::testing::Values(2, 3));

TEST(ReductionExamples, NonInvariantContrastIsRejected) {
  auto s = sphere_scenario(2);
  s.contrast.evaluator = ArrowFunction([](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const auto& pr = std::get<PairArrow<T>>(a);
    const T d = pr.first[3] - pr.second[3];  // p(0, 1) moves under the right action
    return d * d;
  });
  EXPECT_THROW(reduce_tensors(s, s.reference_point), DomainError);
}

}  // namespace
}  // namespace infogeo
