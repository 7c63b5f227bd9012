#include "infogeo/algebroid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace infogeo {
namespace {

Frame so3_frame() { return standard_frame(MatrixGroup(GroupKind::SO, 3)); }
Frame flat_frame(int d) { return standard_frame(PairGroupoid::euclidean(d)); }

// Hand-written so(3) basis and commutator coordinates (independent of MatrixGroup).
std::vector<MatrixXd> so3_basis() {
  std::vector<MatrixXd> b(3, MatrixXd::Zero(3, 3));
  b[0](0, 1) = 1, b[0](1, 0) = -1;
  b[1](0, 2) = 1, b[1](2, 0) = -1;
  b[2](1, 2) = 1, b[2](2, 1) = -1;
  return b;
}

VectorXd so3_coords(const MatrixXd& m) { return (VectorXd(3) << m(0, 1), m(0, 2), m(1, 2)).finished(); }

MatrixXd curved_metric(const VectorXd& x) {
  MatrixXd g(2, 2);
  g << 1 + x[0] * x[0], 0.3 * x[0] * x[1], 0.3 * x[0] * x[1], 2 + std::sin(x[1]);
  return g;
}

// Classical Christoffel symbols with analytic metric derivatives.
Tensor christoffel_oracle(const VectorXd& x) {
  std::array<MatrixXd, 2> dg;
  dg[0] = (MatrixXd(2, 2) << 2 * x[0], 0.3 * x[1], 0.3 * x[1], 0).finished();
  dg[1] = (MatrixXd(2, 2) << 0, 0.3 * x[0], 0.3 * x[0], std::cos(x[1])).finished();
  const MatrixXd ginv = curved_metric(x).inverse();
  Tensor out(3, 2);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = 0;
        for (int l = 0; l < 2; ++l) v += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        out(k, i, j) = v;
      }
  return out;
}

TEST(Bracket, ConstantSectionsOnMatrixGroupGiveCommutators) {
  const Frame f = so3_frame();
  const auto b = so3_basis();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const VectorXd got = bracket(f, constant_section(VectorXd::Unit(3, i)), constant_section(VectorXd::Unit(3, j)),
                                   VectorXd(0));
      const VectorXd expected = so3_coords(b[i] * b[j] - b[j] * b[i]);
      EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Bracket, CoordinateFrameJacobiLieBracket) {
  const Frame f = flat_frame(2);
  const VectorXd x = (VectorXd(2) << 0.4, -1.2).finished();
  const Section X = constant_section(VectorXd::Unit(2, 0));
  const Section Y([](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    Vec<T> v(2);
    v << T(0.0), p[0];
    return v;
  });
  EXPECT_LT((bracket(f, X, Y, x) - VectorXd::Unit(2, 1)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(bracket(f, Y, Y, x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Bracket, LeibnizRule) {
  const Frame f = standard_frame(PairGroupoid::over_group(MatrixGroup(GroupKind::SO, 3)));
  std::mt19937 rng(3);
  const VectorXd x = MatrixGroup(GroupKind::SO, 3).random_element(rng).reshaped();
  const Section X([](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    using std::sin;
    Vec<T> v(3);
    v << sin(p[0]), p[4] * p[1], T(1.0) + p[8];
    return v;
  });
  const Section Y([](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    Vec<T> v(3);
    v << p[2], T(0.5), p[3] * p[3];
    return v;
  });
  auto fn = [](const VectorXd& p) { return std::cos(p[0] + 2 * p[5]); };
  const Section fY([&](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    using std::cos;
    const T s = cos(p[0] + 2.0 * p[5]);
    return Vec<T>(Y(p) * s);
  });
  const VectorXd lhs = bracket(f, X, fY, x);
  const VectorXd rhs = fn(x) * bracket(f, X, Y, x) + anchor_derivative(f, X(x), fn, x) * Y(x);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Koszul, FlatChartConstantMetricVanishes) {
  const Frame f = flat_frame(3);
  const MatrixXd g = (MatrixXd(3, 3) << 2, 0.5, 0, 0.5, 1, 0.1, 0, 0.1, 3).finished();
  const auto gamma = koszul_levi_civita(f, [&](const VectorXd&) { return g; }, VectorXd::Zero(3));
  EXPECT_LT(gamma.upper.max_abs(), 1e-14);
}

TEST(Koszul, BiInvariantMetricOnSo3GivesHalfBracket) {
  const Frame f = so3_frame();
  const auto b = so3_basis();
  const MetricField g = [&](const VectorXd&) {
    MatrixXd m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = -0.5 * (b[i] * b[j]).trace();
    return m;
  };
  const auto gamma = koszul_levi_civita(f, g, VectorXd(0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const VectorXd half = 0.5 * so3_coords(b[i] * b[j] - b[j] * b[i]);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(gamma.upper(k, i, j), half[k], 1e-14);
    }
  EXPECT_LT(torsion(f, gamma, VectorXd(0)).max_abs(), 1e-14);
}

TEST(Koszul, MatchesChristoffelOracle) {
  const Frame f = flat_frame(2);
  const VectorXd x = (VectorXd(2) << 0.7, -0.3).finished();
  const auto gamma = koszul_levi_civita(f, curved_metric, x);
  EXPECT_LT(max_difference(gamma.upper, christoffel_oracle(x)), 1e-9);
  EXPECT_LT(metricity_residual(f, curved_metric, gamma, x), 1e-6);
  EXPECT_LT(torsion(f, gamma, x).max_abs(), 1e-12);
}

TEST(Koszul, BinaryFisherMetricIsMetric) {
  const Frame f = flat_frame(1);
  const MetricField g = [](const VectorXd& t) { return MatrixXd::Constant(1, 1, 1.0 / (t[0] * (1 - t[0]))); };
  for (double th : {0.2, 0.5, 0.8}) {
    const VectorXd x = VectorXd::Constant(1, th);
    const auto gamma = koszul_levi_civita(f, g, x);
    EXPECT_LT(metricity_residual(f, g, gamma, x), 1e-6);
    // 1-d oracle: Gamma = g'/(2g) = (2 th - 1) / (2 th (1 - th)).
    EXPECT_NEAR(gamma.upper(0, 0, 0), (2 * th - 1) / (2 * th * (1 - th)), 1e-7);
  }
}

TEST(Koszul, RejectsSingularMetric) {
  const Frame f = flat_frame(2);
  const MetricField g = [](const VectorXd&) { return (MatrixXd(2, 2) << 1, 1, 1, 1).finished(); };
  try {
    koszul_levi_civita(f, g, VectorXd::Zero(2));
    FAIL() << "expected DegenerateMetricError";
  } catch (const DegenerateMetricError& e) {
    EXPECT_EQ(e.rank, 1);
    EXPECT_EQ(e.size, 2);
    EXPECT_NE(std::string(e.what()).find("rank 1 of 2"), std::string::npos);
  }
}

// Property: Koszul is the unique torsion-free metric solution. Oracle: least-squares solve
// of the linear torsion and metricity constraints on the r^3 unknowns.
TEST(KoszulProperty, UniqueMinimizerOfTorsionAndMetricity) {
  const Frame f = standard_frame(PairGroupoid::over_group(MatrixGroup(GroupKind::SO, 3)));
  const MetricField g = [](const VectorXd& p) {
    MatrixXd m = MatrixXd::Identity(3, 3);
    m(0, 0) += p[1] * p[1];
    m(1, 2) = m(2, 1) = 0.3 * p[3];
    m(2, 2) += 0.5 * std::sin(p[6]);
    return m;
  };
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorXd x = MatrixGroup(GroupKind::SO, 3).random_element(rng).reshaped();
    const int r = 3;
    const MatrixXd g0 = g(x);
    const Tensor c = f.structure(x);
    const MatrixXd alpha = f.anchor(x);
    auto var = [&](int k, int i, int j) { return (k * r + i) * r + j; };
    const int n = r * r * r;
    MatrixXd A = MatrixXd::Zero(2 * n, n);
    VectorXd rhs = VectorXd::Zero(2 * n);
    int row = 0;
    for (int k = 0; k < r; ++k)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j, ++row) {
          A(row, var(k, i, j)) += 1;
          A(row, var(k, j, i)) -= 1;
          rhs[row] = c(k, i, j);
        }
    for (int i = 0; i < r; ++i) {
      const double h = 1e-5;
      const VectorXd v = alpha.col(i);
      const MatrixXd dg = (g(x + h * v) - g(x - h * v)) / (2 * h);
      for (int j = 0; j < r; ++j)
        for (int k = 0; k < r; ++k, ++row) {
          for (int m = 0; m < r; ++m) {
            A(row, var(m, i, j)) += g0(m, k);
            A(row, var(m, i, k)) += g0(m, j);
          }
          rhs[row] = dg(j, k);
        }
    }
    const VectorXd sol = A.colPivHouseholderQr().solve(rhs);
    ASSERT_LT((A * sol - rhs).norm(), 1e-8);
    const auto gamma = koszul_levi_civita(f, g, x);
    for (int k = 0; k < r; ++k)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) EXPECT_NEAR(gamma.upper(k, i, j), sol[var(k, i, j)], 1e-6);
    EXPECT_LT(metricity_residual(f, g, gamma, x), 1e-6);
    EXPECT_LT(torsion(f, gamma, x).max_abs(), 1e-9);
  }
}

TEST(Curvature, FlatIsZero) {
  const Frame f = flat_frame(2);
  const ConnectionField zero = [](const VectorXd&) { return ConnectionCoeffs{Tensor(3, 2)}; };
  EXPECT_LT(curvature_tensor(f, zero, VectorXd::Ones(2)).max_abs(), 1e-15);
  EXPECT_LT(torsion(f, zero(VectorXd::Ones(2)), VectorXd::Ones(2)).max_abs(), 1e-15);
}

TEST(Curvature, BiInvariantLieAlgebraOracle) {
  // nabla_X Y = [X,Y]/2 on a Lie algebra gives Curv(X,Y)Z = -[[X,Y],Z]/4.
  const Frame f = so3_frame();
  const auto b = so3_basis();
  const Tensor c = f.structure(VectorXd(0));
  const ConnectionField half = [c](const VectorXd&) { return ConnectionCoeffs{0.5 * c}; };
  const VectorXd X = (VectorXd(3) << 0.3, -1.0, 0.5).finished();
  const VectorXd Y = (VectorXd(3) << 1.1, 0.2, -0.7).finished();
  const MatrixXd R = curvature(f, half, constant_section(X), constant_section(Y), VectorXd(0));
  auto mat = [&](const VectorXd& v) { return MatrixXd(v[0] * b[0] + v[1] * b[1] + v[2] * b[2]); };
  for (int cidx = 0; cidx < 3; ++cidx) {
    const MatrixXd Z = b[cidx];
    const MatrixXd xy = mat(X) * mat(Y) - mat(Y) * mat(X);
    const VectorXd expected = -0.25 * so3_coords(xy * Z - Z * xy);
    EXPECT_LT((R.col(cidx) - expected).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Duality, LeviCivitaIsSelfDualAndPerturbationIsDetected) {
  const Frame f = flat_frame(2);
  const VectorXd x = (VectorXd(2) << 0.7, -0.3).finished();
  const auto lc = koszul_levi_civita(f, curved_metric, x);
  const Section X([](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    Vec<T> v(2);
    v << T(1.0) + p[1], p[0] * p[0];
    return v;
  });
  const Section Y([](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    using std::sin;
    Vec<T> v(2);
    v << sin(p[0]), T(2.0);
    return v;
  });
  const Section Z = constant_section((VectorXd(2) << 0.4, -0.9).finished());
  EXPECT_LT(dual_connection_check(f, curved_metric, lc, lc, x, X, Y, Z), 1e-6);
  EXPECT_LT(duality_residual(f, curved_metric, lc, lc, x), 1e-6);

  ConnectionCoeffs bad = lc;
  for (double& v : bad.upper.data()) v += 0.1;
  EXPECT_GT(dual_connection_check(f, curved_metric, lc, bad, x, X, Y, Z), 1e-3);
  EXPECT_GT(duality_residual(f, curved_metric, lc, bad, x), 1e-3);
}

TEST(FrameProperty, StandardFramesAreConsistent) {
  std::mt19937 rng(5);
  const std::vector<GroupoidFamily> fams = {
      MatrixGroup(GroupKind::U, 2), MatrixGroup(GroupKind::SO, 4), PairGroupoid::euclidean(3),
      PairGroupoid::over_group(MatrixGroup(GroupKind::SO, 3)), PairGroupoid::over_group(MatrixGroup(GroupKind::SU, 2))};
  for (const auto& fam : fams) {
    const Frame f = standard_frame(fam);
    for (int trial = 0; trial < 3; ++trial) {
      const VectorXd x = sample_point(fam, rng);
      const auto res = frame_residuals(f, x);
      EXPECT_EQ(res.antisymmetry, 0.0) << describe(fam);
      EXPECT_LT(res.jacobi, 1e-6) << describe(fam);
      EXPECT_LT(res.anchor, 1e-6) << describe(fam);
    }
  }
}

TEST(Tensor, SymmetryHelpers) {
  Tensor t(3, 2);
  t(0, 0, 1) = 1.0;
  EXPECT_EQ(t.symmetry_residual(), 1.0);
  const Tensor s = t.symmetrized();
  EXPECT_EQ(s.symmetry_residual(), 0.0);
  EXPECT_NEAR(s(1, 0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(t(0, 0), DomainError);
  EXPECT_THROW(t(0, 0, 2), DomainError);
}

}  // namespace
}  // namespace infogeo
