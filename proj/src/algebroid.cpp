#include "infogeo/algebroid.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <sstream>

namespace infogeo {

namespace {

Tensor structure_tensor(const std::vector<MatrixXd>& c) {
  const int r = static_cast<int>(c.size());
  Tensor t(3, r);
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) t(k, i, j) = c[k](i, j);
  return t;
}

// Five-point central difference of a vector-valued map along the anchor image of X; zero when the image vanishes.
template <class V, class F>
V along(const Frame& frame, const VectorXd& X, const VectorXd& x, double h, F&& f, V zero) {
  if (frame.dim == 0) return zero;
  const VectorXd v = frame.anchor(x) * X;
  if (v.cwiseAbs().maxCoeff() == 0.0) return zero;
  V p1 = f(VectorXd(x + h * v));
  V m1 = f(VectorXd(x - h * v));
  V p2 = f(VectorXd(x + 2.0 * h * v));
  V m2 = f(VectorXd(x - 2.0 * h * v));
  return (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
}

// dg[i] = alpha(e_i) g at x.
std::vector<MatrixXd> metric_derivatives(const Frame& frame, const MetricField& g, const VectorXd& x, double h) {
  std::vector<MatrixXd> out;
  const MatrixXd zero = MatrixXd::Zero(frame.rank, frame.rank);
  for (int i = 0; i < frame.rank; ++i) {
    out.push_back(along(frame, VectorXd::Unit(frame.rank, i), x, h, g, zero));
  }
  return out;
}

Tensor tensor_derivative(const Frame& frame, const VectorXd& X, const VectorXd& x, double h,
                         const std::function<Tensor(const VectorXd&)>& f, const Tensor& zero) {
  if (frame.dim == 0) return zero;
  const VectorXd v = frame.anchor(x) * X;
  if (v.cwiseAbs().maxCoeff() == 0.0) return zero;
  Tensor d = 8.0 * (f(VectorXd(x + h * v)) - f(VectorXd(x - h * v)));
  d -= f(VectorXd(x + 2.0 * h * v)) - f(VectorXd(x - 2.0 * h * v));
  d *= 1.0 / (12.0 * h);
  return d;
}

}  // namespace

Frame standard_frame(const GroupoidFamily& family) {
  Frame f;
  f.rank = algebroid_rank(family);
  f.dim = base_dimension(family);
  f.chart_id = chart_id(family);
  f.labels = basis_labels(family);

  const BaseFamily base = std::visit(
      [](const auto& b) -> BaseFamily {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, TrivializedG>) {
          return b.base;
        } else {
          return b;
        }
      },
      family);
  Tensor c(3, f.rank);
  if (auto* m = std::get_if<MatrixGroup>(&base)) {
    c = structure_tensor(m->structure_constants());
  } else if (const auto& g = std::get<PairGroupoid>(base).group()) {
    c = structure_tensor(g->structure_constants());
  }
  f.structure = [c](const VectorXd&) { return c; };

  if (f.dim == 0) {
    const int r = f.rank;
    f.anchor = [r](const VectorXd&) { return MatrixXd(0, r); };
  } else {
    auto fam = std::make_shared<const GroupoidFamily>(family);
    f.anchor = [fam](const VectorXd& x) { return anchor_matrix(*fam, x); };
  }
  return f;
}

Tensor ConnectionCoeffs::lowered(const MatrixXd& g) const {
  const int r = upper.dim();
  Tensor out(3, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        double acc = 0.0;
        for (int m = 0; m < r; ++m) acc += upper(m, i, j) * g(m, k);
        out(i, j, k) = acc;
      }
  return out;
}

ConnectionCoeffs ConnectionCoeffs::raise(const Tensor& lowered, const MatrixXd& g) {
  require_metric(g);
  const int r = lowered.dim();
  Eigen::FullPivLU<MatrixXd> lu(g);
  ConnectionCoeffs out{Tensor(3, r)};
  VectorXd l(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      for (int k = 0; k < r; ++k) l[k] = lowered(i, j, k);
      const VectorXd up = lu.solve(l);
      for (int m = 0; m < r; ++m) out.upper(m, i, j) = up[m];
    }
  return out;
}

VectorXd ConnectionCoeffs::covariant(const VectorXd& X, const VectorXd& Y, const VectorXd& dY) const {
  const int r = upper.dim();
  VectorXd out = dY;
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) out[k] += upper(k, i, j) * X[i] * Y[j];
  return out;
}

MetricInfo metric_info(const MatrixXd& g, double rel_tol) {
  MetricInfo info;
  if (g.size() == 0) return info;
  Eigen::JacobiSVD<MatrixXd> svd(g);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.maxCoeff();
  const double smin = info.singular_values.minCoeff();
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    if (info.singular_values[i] > rel_tol * smax) ++info.rank;
  }
  info.cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return info;
}

namespace {

std::string degenerate_message(int rank, int size, double cond) {
  std::ostringstream os;
  os << "degenerate metric: rank " << rank << " of " << size << " (condition number " << cond << ")";
  return os.str();
}

}  // namespace

DegenerateMetricError::DegenerateMetricError(int rank_, int size_, double cond)
    : NumericError(degenerate_message(rank_, size_, cond)), rank(rank_), size(size_) {}

void require_metric(const MatrixXd& g) {
  const MetricInfo info = metric_info(g);
  const int n = static_cast<int>(g.rows());
  if (info.rank < n) throw DegenerateMetricError(info.rank, n, info.cond);
  if (info.cond >= 1e8) spdlog::warn("metric is nearly degenerate (condition number {:.3e})", info.cond);
}

double anchor_derivative(const Frame& frame, const VectorXd& X, const std::function<double(const VectorXd&)>& f,
                         const VectorXd& x, double h) {
  return along(frame, X, x, h, f, 0.0);
}

VectorXd anchor_derivative(const Frame& frame, const VectorXd& X, const Section& Y, const VectorXd& x, double h) {
  return along(frame, X, x, h, [&](const VectorXd& y) { return VectorXd(Y(y)); }, VectorXd(VectorXd::Zero(frame.rank)));
}

VectorXd bracket(const Frame& frame, const Section& X, const Section& Y, const VectorXd& x, double h) {
  const VectorXd xv = X(x);
  const VectorXd yv = Y(x);
  const Tensor c = frame.structure(x);
  VectorXd out = anchor_derivative(frame, xv, Y, x, h) - anchor_derivative(frame, yv, X, x, h);
  for (int k = 0; k < frame.rank; ++k)
    for (int i = 0; i < frame.rank; ++i)
      for (int j = 0; j < frame.rank; ++j) out[k] += c(k, i, j) * xv[i] * yv[j];
  return out;
}

ConnectionCoeffs koszul_levi_civita(const Frame& frame, const MetricField& g, const VectorXd& x, double h) {
  const int r = frame.rank;
  const MatrixXd g0 = g(x);
  require_metric(g0);
  const std::vector<MatrixXd> dg = metric_derivatives(frame, g, x, h);
  const Tensor c = frame.structure(x);
  Tensor low(3, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        double v = dg[i](j, k) + dg[j](k, i) - dg[k](i, j);
        for (int m = 0; m < r; ++m) v += c(m, i, j) * g0(m, k) - c(m, j, k) * g0(m, i) - c(m, i, k) * g0(m, j);
        low(i, j, k) = 0.5 * v;
      }
  return ConnectionCoeffs::raise(low, g0);
}

Tensor torsion(const Frame& frame, const ConnectionCoeffs& gamma, const VectorXd& x) {
  const int r = frame.rank;
  const Tensor c = frame.structure(x);
  Tensor t(3, r);
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) t(k, i, j) = gamma.upper(k, i, j) - gamma.upper(k, j, i) - c(k, i, j);
  return t;
}

Tensor curvature_tensor(const Frame& frame, const ConnectionField& gamma, const VectorXd& x, double h) {
  const int r = frame.rank;
  const Tensor g0 = gamma(x).upper;
  const Tensor c = frame.structure(x);
  std::vector<Tensor> dg;
  for (int a = 0; a < r; ++a) {
    dg.push_back(tensor_derivative(frame, VectorXd::Unit(r, a), x, h,
                                   [&](const VectorXd& y) { return gamma(y).upper; }, Tensor(3, r)));
  }
  Tensor out(4, r);
  for (int m = 0; m < r; ++m)
    for (int cc = 0; cc < r; ++cc)
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
          double v = dg[a](m, b, cc) - dg[b](m, a, cc);
          for (int k = 0; k < r; ++k) {
            v += g0(k, b, cc) * g0(m, a, k) - g0(k, a, cc) * g0(m, b, k) - c(k, a, b) * g0(m, k, cc);
          }
          out(m, cc, a, b) = v;
        }
  return out;
}

MatrixXd curvature(const Frame& frame, const ConnectionField& gamma, const Section& X, const Section& Y,
                   const VectorXd& x, double h) {
  const int r = frame.rank;
  const Tensor R = curvature_tensor(frame, gamma, x, h);
  const VectorXd xv = X(x);
  const VectorXd yv = Y(x);
  MatrixXd out = MatrixXd::Zero(r, r);
  for (int m = 0; m < r; ++m)
    for (int cc = 0; cc < r; ++cc)
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) out(m, cc) += xv[a] * yv[b] * R(m, cc, a, b);
  return out;
}

double metricity_residual(const Frame& frame, const MetricField& g, const ConnectionCoeffs& gamma, const VectorXd& x,
                          double h) {
  return duality_residual(frame, g, gamma, gamma, x, h);
}

double duality_residual(const Frame& frame, const MetricField& g, const ConnectionCoeffs& gamma,
                        const ConnectionCoeffs& gamma_star, const VectorXd& x, double h) {
  const int r = frame.rank;
  const MatrixXd g0 = g(x);
  const std::vector<MatrixXd> dg = metric_derivatives(frame, g, x, h);
  const Tensor l = gamma.lowered(g0);
  const Tensor ls = gamma_star.lowered(g0);
  double worst = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) worst = std::max(worst, std::abs(dg[i](j, k) - l(i, j, k) - ls(i, k, j)));
  return worst;
}

double dual_connection_check(const Frame& frame, const MetricField& g, const ConnectionCoeffs& gamma,
                             const ConnectionCoeffs& gamma_star, const VectorXd& x, const Section& X,
                             const Section& Y, const Section& Z, double h) {
  const VectorXd xv = X(x);
  const VectorXd yv = Y(x);
  const VectorXd zv = Z(x);
  const MatrixXd g0 = g(x);
  const double lhs = anchor_derivative(
      frame, xv, [&](const VectorXd& y) { return VectorXd(Y(y)).dot(g(y) * VectorXd(Z(y))); }, x, h);
  const VectorXd ny = gamma.covariant(xv, yv, anchor_derivative(frame, xv, Y, x, h));
  const VectorXd nz = gamma_star.covariant(xv, zv, anchor_derivative(frame, xv, Z, x, h));
  return std::abs(lhs - ny.dot(g0 * zv) - yv.dot(g0 * nz));
}

FrameResiduals frame_residuals(const Frame& frame, const VectorXd& x, double h) {
  const int r = frame.rank;
  FrameResiduals res;
  const Tensor c = frame.structure(x);
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) res.antisymmetry = std::max(res.antisymmetry, std::abs(c(k, i, j) + c(k, j, i)));

  std::vector<Tensor> dc;
  for (int k = 0; k < r; ++k) {
    dc.push_back(tensor_derivative(frame, VectorXd::Unit(r, k), x, h, frame.structure, Tensor(3, r)));
  }
  // [[e_i, e_j], e_k] = (C^l_ij C^m_lk - alpha_k C^m_ij) e_m, summed cyclically.
  auto term = [&](int m, int i, int j, int k) {
    double v = -dc[k](m, i, j);
    for (int l = 0; l < r; ++l) v += c(l, i, j) * c(m, l, k);
    return v;
  };
  for (int m = 0; m < r; ++m)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        for (int k = 0; k < r; ++k) {
          res.jacobi = std::max(res.jacobi, std::abs(term(m, i, j, k) + term(m, j, k, i) + term(m, k, i, j)));
        }

  if (frame.dim > 0) {
    const MatrixXd a0 = frame.anchor(x);
    // Directional derivative of the anchor columns along v.
    auto d_anchor = [&](const VectorXd& v) -> MatrixXd {
      return (frame.anchor(VectorXd(x + h * v)) - frame.anchor(VectorXd(x - h * v))) / (2.0 * h);
    };
    std::vector<MatrixXd> da;
    for (int i = 0; i < r; ++i) da.push_back(d_anchor(a0.col(i)));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        VectorXd lhs = VectorXd::Zero(frame.dim);
        for (int k = 0; k < r; ++k) lhs += c(k, i, j) * a0.col(k);
        const VectorXd rhs = da[i].col(j) - da[j].col(i);
        res.anchor = std::max(res.anchor, (lhs - rhs).cwiseAbs().maxCoeff());
      }
  }
  return res;
}

}  // namespace infogeo
