#include "infogeo/reduction.hpp"

#include <cmath>

namespace infogeo {

GroupAction conjugation_action(const MatrixGroup& acting, double scale) {
  GroupAction a;
  a.name = "conjugation by " + acting.name();
  a.sample_element = [acting, scale](std::mt19937& rng) { return acting.random_element(rng, scale); };
  a.act = [](const Arrow<double>& arrow, const MatrixXd& g) -> Arrow<double> {
    const auto& m = std::get<MatrixArrow<double>>(arrow);
    return MatrixArrow<double>{matrix_inverse(g) * m.value * g};
  };
  return a;
}

InvarianceReport check_invariance(const ContrastFunction& f, const GroupAction& action,
                                  const std::vector<Arrow<double>>& arrows, std::uint32_t seed, int per_arrow,
                                  double tol) {
  std::mt19937 rng(seed);
  InvarianceReport rep;
  for (const auto& a : arrows) {
    const double base = f.evaluator(a);
    for (int k = 0; k < per_arrow; ++k) {
      const MatrixXd g = action.sample_element(rng);
      rep.max_deviation = std::max(rep.max_deviation, std::abs(f.evaluator(action.act(a, g)) - base));
      ++rep.evaluations;
    }
  }
  rep.pass = rep.max_deviation < tol;
  return rep;
}

namespace {

void require_invariant(const ReducedScenario& s) {
  std::vector<Arrow<double>> arrows;
  std::mt19937 rng(17);
  for (int k = 0; k < 8; ++k) arrows.push_back(sample_arrow(*s.contrast.family, rng));
  const auto inv = check_invariance(s.contrast, s.action, arrows, 29, 2);
  if (!inv.pass)
    throw DomainError("contrast is not invariant under " + s.action.name + " (deviation " +
                      std::to_string(inv.max_deviation) + ")");
}

ReducedTensors reduce_metric_skewness(const ReducedScenario& s, const VectorXd& x0, const MatrixXd& fiber,
                                      DiffMethod method) {
  ReducedTensors out;
  out.lift = s.lift(x0, fiber);
  const auto basis = s.frame_sections(x0, fiber);
  out.g = metric_gF(s.contrast, out.lift, basis, method);
  out.t = skewness_TF(s.contrast, out.lift, basis, method);
  out.info = metric_info(out.g.as_matrix());
  return out;
}

}  // namespace

ReducedTensors reduce_tensors(const ReducedScenario& s, const VectorXd& x0, const MatrixXd& fiber,
                              DiffMethod method) {
  require_invariant(s);
  ReducedTensors out = reduce_metric_skewness(s, x0, fiber, method);
  const auto basis = s.frame_sections(x0, fiber);
  if (out.info.rank == static_cast<int>(basis.size())) out.connections = connection_F(s.contrast, out.lift, basis, method);
  return out;
}

ReducedTensors reduce_tensors(const ReducedScenario& s, const VectorXd& x0, DiffMethod method) {
  return reduce_tensors(s, x0, s.fiber_identity, method);
}

double lift_independence_residual(const ReducedScenario& s, const VectorXd& x0, std::uint32_t seed, int lifts,
                                  DiffMethod method) {
  require_invariant(s);
  const auto base = reduce_metric_skewness(s, x0, s.fiber_identity, method);
  std::mt19937 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < lifts; ++k) {
    const auto other = reduce_metric_skewness(s, x0, s.action.sample_element(rng), method);
    worst = std::max({worst, max_difference(base.g, other.g), max_difference(base.t, other.t)});
  }
  return worst;
}

MetricField reduced_metric_field(const ReducedScenario& s, DiffMethod method) {
  return [s, method](const VectorXd& x) {
    const VectorXd p = s.lift(x, s.fiber_identity);
    return metric_gF(s.contrast, p, s.frame_sections(x, s.fiber_identity), method).as_matrix();
  };
}

// ---------------------------------------------------------------------------
// Sphere

MatrixXd sphere_section(const VectorXd& x) {
  const Eigen::Index m = x.size();
  const double norm = x.norm();
  if (norm == 0.0) throw DomainError("sphere point must be nonzero");
  const VectorXd u = x / norm;
  MatrixXd q = MatrixXd::Identity(m, m);
  VectorXd w = VectorXd::Unit(m, 0) - u;
  if (w.norm() > 1e-12) {
    q -= 2.0 * w * w.transpose() / w.squaredNorm();  // reflection e_1 <-> u
    q.col(1) *= -1.0;
  }
  return q;
}

namespace {

// Coefficients of M in an orthonormal basis for 1/2 tr(X Y^t).
template <class T>
Vec<T> so_coordinates(const std::vector<MatrixXd>& basis, const Mat<T>& m) {
  Vec<T> out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    T c(0.0);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (basis[k](i, j) != 0.0) c += 0.5 * basis[k](i, j) * m(i, j);
    out[static_cast<Eigen::Index>(k)] = c;
  }
  return out;
}

template <class T>
Mat<T> unflatten(const Vec<T>& v, int m) {
  Mat<T> p(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) p(i, j) = v[j * m + i];
  return p;
}

VectorXd flatten(const MatrixXd& p) { return p.reshaped(); }

}  // namespace

ReducedScenario sphere_scenario(int n) {
  if (n < 2) throw DomainError("sphere scenario needs n >= 2");
  const int m = n + 1;
  const MatrixGroup big(GroupKind::SO, m);
  const MatrixGroup small(GroupKind::SO, n);

  ReducedScenario s;
  s.name = "sphere:" + std::to_string(n);
  s.quotient_chart = "S^" + std::to_string(n) + " in R^" + std::to_string(m);
  // F = 1/4 tr(2I - A - A^t) = 1/2 (m - sum p o p').
  ArrowFunction f([m](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const auto& pr = std::get<PairArrow<T>>(a);
    T dot(0.0);
    for (Eigen::Index i = 0; i < pr.first.size(); ++i) dot += pr.first[i] * pr.second[i];
    return 0.5 * (T(static_cast<double>(m)) - dot);
  });
  s.contrast = make_contrast(PairGroupoid::over_group(big), std::move(f), 1, true, s.name);

  auto embed = [m](const MatrixXd& gamma) {
    MatrixXd g = MatrixXd::Identity(m, m);
    g.bottomRightCorner(m - 1, m - 1) = gamma;
    return g;
  };
  s.action.name = "right " + small.name() + " action";
  s.action.sample_element = [small](std::mt19937& rng) { return small.random_element(rng); };
  s.action.act = [m, embed](const Arrow<double>& arrow, const MatrixXd& gamma) -> Arrow<double> {
    const auto& pr = std::get<PairArrow<double>>(arrow);
    const MatrixXd g = embed(gamma);
    return PairArrow<double>{flatten(unflatten<double>(pr.first, m) * g),
                             flatten(unflatten<double>(pr.second, m) * g)};
  };
  s.fiber_identity = MatrixXd::Identity(n, n);
  s.lift = [embed](const VectorXd& x0, const MatrixXd& gamma) {
    return VectorXd(flatten(sphere_section(x0) * embed(gamma)));
  };

  // Right-invariant fields p -> X p, i.e. p^t X p in the left trivialization.
  const auto basis = big.basis();
  std::vector<Section> sections;
  for (const auto& x : basis) {
    sections.push_back(Section([x, basis, m](const auto& v) {
      using T = typename std::decay_t<decltype(v)>::Scalar;
      const Mat<T> p = unflatten(v, m);
      return so_coordinates<T>(basis, Mat<T>(p.transpose() * x.template cast<T>() * p));
    }));
  }
  s.frame_sections = [sections](const VectorXd&, const MatrixXd&) { return sections; };
  s.labels = big.basis_labels();

  // Quotient frame: so(n+1) acting on R^{n+1}; the bracket of right-invariant fields is -[X, Y].
  Frame q;
  q.rank = big.algebra_dim();
  q.dim = m;
  q.chart_id = s.quotient_chart;
  q.labels = s.labels;
  q.anchor = [basis, m](const VectorXd& x) {
    MatrixXd a(m, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = basis[k] * x;
    return a;
  };
  Tensor c(3, q.rank);
  const auto& sc = big.structure_constants();
  for (int k = 0; k < q.rank; ++k)
    for (int i = 0; i < q.rank; ++i)
      for (int j = 0; j < q.rank; ++j) c(k, i, j) = -sc[k](i, j);
  q.structure = [c](const VectorXd&) { return c; };
  s.quotient_frame = q;
  s.reference_point = VectorXd::Unit(m, 0);
  return s;
}

// ---------------------------------------------------------------------------
// Fubini-Study

MatrixXd complex_structure(int n) {
  MatrixXd j = MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = MatrixXd::Identity(n, n);
  return j;
}

namespace {

Eigen::VectorXcd to_complex(const VectorXd& v) {
  const Eigen::Index n = v.size() / 2;
  return v.head(n).cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * v.tail(n).cast<std::complex<double>>();
}

VectorXd to_real(const Eigen::VectorXcd& z) {
  VectorXd v(2 * z.size());
  v << z.real(), z.imag();
  return v;
}

std::complex<double> scalar_of(const MatrixXd& e) { return {e(0, 0), e(0, 1)}; }

// Orthonormal complex basis of the complement of phi, by Gram-Schmidt on the standard basis.
std::vector<Eigen::VectorXcd> complement_basis(const Eigen::VectorXcd& phi) {
  std::vector<Eigen::VectorXcd> out{phi.normalized()};
  for (Eigen::Index k = 0; k < phi.size() && static_cast<Eigen::Index>(out.size()) < phi.size(); ++k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(phi.size(), k);
    for (const auto& b : out) v -= b.dot(v) * b;
    if (v.norm() > 1e-8) out.push_back(v.normalized());
  }
  out.erase(out.begin());
  return out;
}

}  // namespace

ReducedScenario fubini_study_scenario(int n) {
  if (n < 2) throw DomainError("Fubini-Study scenario needs n >= 2");
  ReducedScenario s;
  s.name = "fubini-study:" + std::to_string(n);
  s.quotient_chart = "CP^" + std::to_string(n - 1) + " via C^" + std::to_string(n);
  ArrowFunction f([n](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const auto& pr = std::get<PairArrow<T>>(a);
    const auto& x = pr.first;
    const auto& y = pr.second;
    T re(0.0), im(0.0), nx(0.0), ny(0.0);
    for (int k = 0; k < n; ++k) {
      re += x[k] * y[k] + x[n + k] * y[n + k];
      im += x[k] * y[n + k] - x[n + k] * y[k];
      nx += x[k] * x[k] + x[n + k] * x[n + k];
      ny += y[k] * y[k] + y[n + k] * y[n + k];
    }
    if (value_of(nx) == 0.0 || value_of(ny) == 0.0) throw DomainError("Fubini-Study contrast at the zero vector");
    return T(1.0) - (re * re + im * im) / (nx * ny);
  });
  s.contrast = make_contrast(PairGroupoid::euclidean(2 * n, "C^" + std::to_string(n)), std::move(f), 1, true, s.name);

  // (z, z') acts by scalar multiplication on target and source; rows hold [re, im].
  s.action.name = "C^x x C^x scaling";
  s.action.sample_element = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> angle(-M_PI, M_PI), radius(0.5, 2.0);
    MatrixXd e(2, 2);
    for (int r = 0; r < 2; ++r) {
      const std::complex<double> z = std::polar(radius(rng), angle(rng));
      e(r, 0) = z.real();
      e(r, 1) = z.imag();
    }
    return e;
  };
  s.action.act = [](const Arrow<double>& arrow, const MatrixXd& e) -> Arrow<double> {
    const auto& pr = std::get<PairArrow<double>>(arrow);
    const std::complex<double> z(e(0, 0), e(0, 1)), w(e(1, 0), e(1, 1));
    return PairArrow<double>{to_real(z * to_complex(pr.first)), to_real(w * to_complex(pr.second))};
  };
  s.fiber_identity = (MatrixXd(2, 2) << 1.0, 0.0, 1.0, 0.0).finished();
  s.lift = [](const VectorXd& x0, const MatrixXd& e) { return to_real(scalar_of(e) * to_complex(x0)); };
  // Horizontal frame {h, i h} over the complement of phi, pushed forward by the fiber scalar.
  s.frame_sections = [](const VectorXd& x0, const MatrixXd& e) {
    const std::complex<double> z = scalar_of(e);
    std::vector<Section> out;
    for (const auto& h : complement_basis(to_complex(x0))) {
      out.push_back(constant_section(to_real(z * h)));
      out.push_back(constant_section(to_real(z * std::complex<double>(0.0, 1.0) * h)));
    }
    return out;
  };
  for (int k = 1; k < n; ++k) {
    s.labels.push_back("h" + std::to_string(k));
    s.labels.push_back("ih" + std::to_string(k));
  }
  s.reference_point = VectorXd::Unit(2 * n, 0);
  return s;
}

}  // namespace infogeo
