#include "infogeo/statistics.hpp"

#include <cmath>
#include <sstream>

namespace infogeo {
namespace {

template <class T>
void require_positive(const Vec<T>& p, const char* what) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (!(value_of(p[i]) > 0.0)) throw DomainError(std::string(what) + ": probability outside (0, 1]");
}

void require_domain(const ParametricModel& m, const VectorXd& theta) {
  if (theta.size() != m.dim) throw DomainError(m.name + ": parameter has wrong dimension");
  if (!m.in_domain(theta)) {
    std::ostringstream os;
    os << m.name << ": parameter outside " << m.domain;
    throw DomainError(os.str());
  }
}

}  // namespace

ParametricModel binary_model() {
  ParametricModel m;
  m.name = "binary";
  m.outcomes = 2;
  m.dim = 1;
  m.probabilities = Lifted<Vec, Vec>([](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    Vec<T> p(2);
    p << th[0], T(1.0) - th[0];
    return p;
  });
  m.score = Lifted<Vec, Mat>([](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    Mat<T> s(2, 1);
    s << T(1.0) / th[0], T(-1.0) / (T(1.0) - th[0]);
    return s;
  });
  m.in_domain = [](const VectorXd& th) { return th[0] >= 1e-6 && th[0] <= 1.0 - 1e-6; };
  m.domain = "0 < theta < 1";
  return m;
}

ParametricModel categorical3_model() {
  ParametricModel m;
  m.name = "categorical3";
  m.outcomes = 3;
  m.dim = 2;
  m.probabilities = Lifted<Vec, Vec>([](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    Vec<T> p(3);
    p << th[0], th[1], T(1.0) - th[0] - th[1];
    return p;
  });
  m.score = Lifted<Vec, Mat>([](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    const T last = T(-1.0) / (T(1.0) - th[0] - th[1]);
    Mat<T> s(3, 2);
    s << T(1.0) / th[0], T(0.0), T(0.0), T(1.0) / th[1], last, last;
    return s;
  });
  m.in_domain = [](const VectorXd& th) {
    return th[0] >= 1e-6 && th[1] >= 1e-6 && th[0] + th[1] <= 1.0 - 1e-6;
  };
  m.domain = "theta_1, theta_2 > 0, theta_1 + theta_2 < 1";
  return m;
}

ParametricModel find_model(const std::string& name) {
  if (name == "binary") return binary_model();
  if (name == "categorical3") return categorical3_model();
  throw DomainError("unknown model '" + name + "'");
}

MatrixXd score_matrix(const ParametricModel& model, const VectorXd& theta, ScoreMethod method) {
  require_domain(model, theta);
  require_positive<double>(model.probabilities(theta), model.name.c_str());
  if (method == ScoreMethod::exact && model.score) return model.score(theta);
  MatrixXd s(model.outcomes, model.dim);
  for (int j = 0; j < model.dim; ++j) {
    VectorXd up = theta, down = theta;
    up[j] += kScoreStep;
    down[j] -= kScoreStep;
    const VectorXd pu = model.probabilities(up);
    const VectorXd pd = model.probabilities(down);
    for (int x = 0; x < model.outcomes; ++x) s(x, j) = (std::log(pu[x]) - std::log(pd[x])) / (2.0 * kScoreStep);
  }
  return s;
}

MatrixXd fisher_metric_sum(const ParametricModel& model, const VectorXd& theta, ScoreMethod method) {
  const MatrixXd s = score_matrix(model, theta, method);
  const VectorXd p = model.probabilities(theta);
  return s.transpose() * p.asDiagonal() * s;
}

Tensor skewness_sum(const ParametricModel& model, const VectorXd& theta, ScoreMethod method) {
  const MatrixXd s = score_matrix(model, theta, method);
  const VectorXd p = model.probabilities(theta);
  Tensor t(3, model.dim);
  for (int j = 0; j < model.dim; ++j)
    for (int k = 0; k < model.dim; ++k)
      for (int l = 0; l < model.dim; ++l) {
        double sum = 0.0;
        for (int x = 0; x < model.outcomes; ++x) sum += p[x] * s(x, j) * s(x, k) * s(x, l);
        t(j, k, l) = sum;
      }
  return t;
}

Tensor alpha_connection_sum(const ParametricModel& model, const VectorXd& theta, double alpha) {
  require_domain(model, theta);
  const int d = model.dim;
  // Second derivatives of log p from a degree-2 jet at theta.
  const auto layout = JetLayout::get(d, 2);
  Vec<Jet> th(d);
  for (int i = 0; i < d; ++i) th[i] = Jet::variable(layout, i, theta[i]);
  const Vec<Jet> p = model.probabilities(th);
  require_positive(p, model.name.c_str());
  std::vector<Jet> logp;
  for (int x = 0; x < model.outcomes; ++x) logp.push_back(log(p[x]));

  Tensor out(3, d);
  std::vector<int> e(static_cast<std::size_t>(d));
  auto partial = [&](const Jet& f, int i, int j) {
    std::fill(e.begin(), e.end(), 0);
    if (i >= 0) ++e[i];
    if (j >= 0) ++e[j];
    return f.partial(e);
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double sum = 0.0;
        for (int x = 0; x < model.outcomes; ++x) {
          const double di = partial(logp[x], i, -1), dj = partial(logp[x], j, -1), dk = partial(logp[x], k, -1);
          sum += p[x].value() * (partial(logp[x], i, j) + 0.5 * (1.0 - alpha) * di * dj) * dk;
        }
        out(i, j, k) = sum;
      }
  return out;
}

double kl_divergence(const ParametricModel& model, const VectorXd& a, const VectorXd& b) {
  const VectorXd pa = model.probabilities(a), pb = model.probabilities(b);
  require_positive<double>(pa, model.name.c_str());
  require_positive<double>(pb, model.name.c_str());
  return (pa.array() * (pa.array() / pb.array()).log()).sum();
}

ContrastFunction kl_contrast(const ParametricModel& model, bool reversed) {
  const int d = model.dim;
  ArrowFunction f([probs = model.probabilities, name = model.name, reversed](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    using std::log;
    const auto& pr = std::get<PairArrow<T>>(a);
    const Vec<T> p = probs(reversed ? pr.first : pr.second);
    const Vec<T> q = probs(reversed ? pr.second : pr.first);
    require_positive(p, name.c_str());
    require_positive(q, name.c_str());
    T out(0.0);
    for (Eigen::Index x = 0; x < p.size(); ++x) out += p[x] * (log(p[x]) - log(q[x]));
    return out;
  });
  return make_contrast(PairGroupoid::euclidean(d, model.name), std::move(f), 1, true,
                       reversed ? "kl:" + model.name + ":reversed" : "kl:" + model.name);
}

// ---------------------------------------------------------------------------
// Potentials

Potential quadratic_potential(int dim) {
  Potential p;
  p.name = "quadratic";
  p.dim = dim;
  p.psi = Lifted<Vec, Scalar>([](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    T out(0.0);
    for (Eigen::Index i = 0; i < th.size(); ++i) out += 0.5 * th[i] * th[i];
    return out;
  });
  p.grad = Lifted<Vec, Vec>([](const auto& th) { return std::decay_t<decltype(th)>(th); });
  p.in_domain = [](const VectorXd&) { return true; };
  p.domain = "R^" + std::to_string(dim);
  return p;
}

Potential quartic1d_potential() {
  Potential p;
  p.name = "quartic1d";
  p.dim = 1;
  p.psi = Lifted<Vec, Scalar>([](const auto& th) { return th[0] * th[0] * th[0] * th[0] / 12.0; });
  p.grad = Lifted<Vec, Vec>([](const auto& th) {
    std::decay_t<decltype(th)> g(1);
    g[0] = th[0] * th[0] * th[0] / 3.0;
    return g;
  });
  p.in_domain = [](const VectorXd& th) { return th[0] > 0.0; };
  p.domain = "theta > 0";
  return p;
}

Potential quadquartic2d_potential() {
  Potential p;
  p.name = "quadquartic2d";
  p.dim = 2;
  p.psi = Lifted<Vec, Scalar>([](const auto& th) {
    return 0.5 * (2.0 * th[0] * th[0] + th[0] * th[1] + th[1] * th[1]) +
           (th[0] * th[0] * th[0] * th[0] + th[1] * th[1] * th[1] * th[1]) / 12.0;
  });
  p.grad = Lifted<Vec, Vec>([](const auto& th) {
    std::decay_t<decltype(th)> g(2);
    g[0] = 2.0 * th[0] + 0.5 * th[1] + th[0] * th[0] * th[0] / 3.0;
    g[1] = 0.5 * th[0] + th[1] + th[1] * th[1] * th[1] / 3.0;
    return g;
  });
  p.in_domain = [](const VectorXd&) { return true; };
  p.domain = "R^2";
  return p;
}

Potential gaussian_natural_potential() {
  Potential p;
  p.name = "gaussian-natural";
  p.dim = 2;
  p.psi = Lifted<Vec, Scalar>([](const auto& th) {
    using std::log;
    return -th[0] * th[0] / (4.0 * th[1]) - 0.5 * log(-2.0 * th[1]);
  });
  p.grad = Lifted<Vec, Vec>([](const auto& th) {
    std::decay_t<decltype(th)> g(2);
    g[0] = -th[0] / (2.0 * th[1]);
    g[1] = th[0] * th[0] / (4.0 * th[1] * th[1]) - 0.5 / th[1];
    return g;
  });
  p.in_domain = [](const VectorXd& th) { return th[1] < 0.0; };
  p.domain = "theta_2 < 0";
  return p;
}

Potential find_potential(const std::string& name) {
  if (name == "quartic1d") return quartic1d_potential();
  if (name == "quadquartic2d") return quadquartic2d_potential();
  if (name == "gaussian-natural") return gaussian_natural_potential();
  throw DomainError("unknown potential '" + name + "'");
}

ContrastFunction bregman_contrast(const Potential& potential) {
  ArrowFunction f([psi = potential.psi, grad = potential.grad](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const auto& pr = std::get<PairArrow<T>>(a);
    const Vec<T>& zeta = pr.first;
    const Vec<T>& xi = pr.second;
    return psi(xi) - psi(zeta) - grad(zeta).dot(xi - zeta);
  });
  return make_contrast(PairGroupoid::euclidean(potential.dim, potential.name), std::move(f), 1, true,
                       "bregman:" + potential.name);
}

// ---------------------------------------------------------------------------
// Prescribed tensors

TensorFields model_tensor_fields(const ParametricModel& model) {
  if (!model.score) throw DomainError(model.name + ": tensor fields need an exact score");
  const int d = model.dim;
  TensorFields out;
  out.dim = d;
  out.g = Lifted<Vec, Mat>([probs = model.probabilities, score = model.score](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    const Vec<T> p = probs(th);
    const Mat<T> s = score(th);
    return Mat<T>(s.transpose() * p.asDiagonal() * s);
  });
  out.t = Lifted<Vec, Vec>([probs = model.probabilities, score = model.score, d](const auto& th) {
    using T = typename std::decay_t<decltype(th)>::Scalar;
    const Vec<T> p = probs(th);
    const Mat<T> s = score(th);
    Vec<T> t = Vec<T>::Zero(d * d * d);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          for (Eigen::Index x = 0; x < p.size(); ++x) t[(j * d + k) * d + l] += p[x] * s(x, j) * s(x, k) * s(x, l);
    return t;
  });
  return out;
}

ContrastFunction build_contrast_from_tensors(const TensorFields& fields, const std::vector<VectorXd>& reference,
                                             std::string chart) {
  const int d = fields.dim;
  for (const auto& x : reference) {
    const MatrixXd g = fields.g(x);
    const VectorXd t = fields.t(x);
    if (g.rows() != d || g.cols() != d || t.size() != d * d * d)
      throw DomainError("tensor fields have the wrong shape");
    Tensor tt(3, d);
    tt.data().assign(t.data(), t.data() + t.size());
    const double scale = 1.0 + g.cwiseAbs().maxCoeff() + tt.max_abs();
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DomainError("g field is not symmetric");
    if (tt.symmetry_residual() > 1e-12 * scale) throw DomainError("T field is not totally symmetric");
  }
  ArrowFunction f([g = fields.g, t = fields.t, d](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const auto& pr = std::get<PairArrow<T>>(a);
    const Vec<T> x = (pr.first + pr.second) * T(0.5);
    const Vec<T> y = pr.second - pr.first;
    const Mat<T> gx = g(x);
    const Vec<T> tx = t(x);
    T quad = y.dot(gx * y);
    T cub(0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) cub += tx[(i * d + j) * d + k] * y[i] * y[j] * y[k];
    return 0.5 * quad + cub / 12.0;
  });
  return make_contrast(PairGroupoid::euclidean(d, std::move(chart)), std::move(f), 1, false, "from-tensors");
}

}  // namespace infogeo
