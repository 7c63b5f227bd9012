#include "infogeo/matrix_group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

namespace infogeo {

namespace {

MatrixXd unit(int n, int i, int j) {
  MatrixXd e = MatrixXd::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

Eigen::MatrixXcd cunit(int n, int i, int j, std::complex<double> v) {
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
  e(i, j) = v;
  return e;
}

}  // namespace

MatrixXd MatrixGroup::real_image(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = m.real();
  out.topRightCorner(n, n) = -m.imag();
  out.bottomLeftCorner(n, n) = m.imag();
  out.bottomRightCorner(n, n) = m.real();
  return out;
}

MatrixGroup::MatrixGroup(GroupKind kind, int n) : kind_(kind), n_(n) {
  if (n < 1 || (kind == GroupKind::SO && n < 2) || (kind == GroupKind::SU && n < 2)) {
    throw DomainError("unsupported matrix group dimension " + std::to_string(n));
  }
  const std::complex<double> i1(0.0, 1.0);
  auto idx = [](int i) { return std::to_string(i + 1); };
  switch (kind) {
    case GroupKind::GL:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          basis_.push_back(unit(n, i, j));
          labels_.push_back("E" + idx(i) + idx(j));
        }
      break;
    case GroupKind::SO:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          basis_.push_back(unit(n, i, j) - unit(n, j, i));
          labels_.push_back("E" + idx(i) + idx(j) + "-E" + idx(j) + idx(i));
        }
      break;
    case GroupKind::U:
    case GroupKind::SU:
      if (kind == GroupKind::U) {
        for (int k = 0; k < n; ++k) {
          basis_.push_back(real_image(cunit(n, k, k, i1)));
          labels_.push_back("iE" + idx(k) + idx(k));
        }
      } else {
        for (int k = 0; k + 1 < n; ++k) {
          basis_.push_back(real_image(cunit(n, k, k, i1) - cunit(n, k + 1, k + 1, i1)));
          labels_.push_back("i(E" + idx(k) + idx(k) + "-E" + idx(k + 1) + idx(k + 1) + ")");
        }
      }
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          basis_.push_back(real_image(cunit(n, k, l, 1.0) - cunit(n, l, k, 1.0)));
          labels_.push_back("E" + idx(k) + idx(l) + "-E" + idx(l) + idx(k));
          basis_.push_back(real_image(cunit(n, k, l, i1) + cunit(n, l, k, i1)));
          labels_.push_back("i(E" + idx(k) + idx(l) + "+E" + idx(l) + idx(k) + ")");
        }
      break;
  }

  const int r = algebra_dim();
  MatrixXd gram(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) gram(a, b) = (basis_[a].array() * basis_[b].array()).sum();
  gram_ = gram.ldlt();

  structure_.assign(r, MatrixXd::Zero(r, r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const VectorXd c = coordinates(basis_[i] * basis_[j] - basis_[j] * basis_[i]);
      for (int k = 0; k < r; ++k) structure_[k](i, j) = c[k];
    }
}

std::string MatrixGroup::name() const {
  const char* prefix = "";
  switch (kind_) {
    case GroupKind::GL:
      prefix = "GL";
      break;
    case GroupKind::U:
      prefix = "U";
      break;
    case GroupKind::SO:
      prefix = "SO";
      break;
    case GroupKind::SU:
      prefix = "SU";
      break;
  }
  return std::string(prefix) + "(" + std::to_string(n_) + ")";
}

VectorXd MatrixGroup::coordinates(const MatrixXd& x) const {
  const int r = algebra_dim();
  VectorXd rhs(r);
  for (int a = 0; a < r; ++a) rhs[a] = (basis_[a].array() * x.array()).sum();
  return gram_.solve(rhs);
}

double MatrixGroup::membership_residual(const MatrixXd& a) const {
  const int m = matrix_size();
  if (a.rows() != m || a.cols() != m) return std::numeric_limits<double>::infinity();
  double res = 0.0;
  if (is_complex()) {
    // Must commute with the complex structure J.
    MatrixXd j = real_image(Eigen::MatrixXcd::Identity(n_, n_) * std::complex<double>(0.0, 1.0));
    res = std::max(res, (a * j - j * a).cwiseAbs().maxCoeff());
  }
  if (kind_ == GroupKind::GL) {
    Eigen::JacobiSVD<MatrixXd> svd(a);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    return (smin <= 1e-12 * std::max(1.0, smax)) ? std::numeric_limits<double>::infinity() : res;
  }
  res = std::max(res, (a.transpose() * a - MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff());
  if (kind_ == GroupKind::SO) {
    res = std::max(res, std::abs(a.determinant() - 1.0));
  } else if (kind_ == GroupKind::SU) {
    // det_C = product of eigenvalues; for the real image det_R = |det_C|^2, so check the phase
    // through the complex block instead.
    Eigen::MatrixXcd c = a.topLeftCorner(n_, n_).cast<std::complex<double>>() +
                         std::complex<double>(0.0, 1.0) * a.bottomLeftCorner(n_, n_).cast<std::complex<double>>();
    res = std::max(res, std::abs(c.determinant() - std::complex<double>(1.0, 0.0)));
  }
  return res;
}

MatrixXd MatrixGroup::random_element(std::mt19937& rng, double scale) const {
  std::normal_distribution<double> normal(0.0, scale);
  VectorXd c(algebra_dim());
  for (int i = 0; i < algebra_dim(); ++i) c[i] = normal(rng);
  return matrix_exp(algebra_element<double>(c));
}

template <class T>
Mat<T> MatrixGroup::inverse(const Mat<T>& a) const {
  if (is_compact()) return a.transpose();
  return matrix_inverse(a);
}

template Mat<double> MatrixGroup::inverse(const Mat<double>&) const;
template Mat<Jet> MatrixGroup::inverse(const Mat<Jet>&) const;

MatrixXd matrix_exp(const MatrixXd& x) { return x.exp(); }

Mat<Jet> matrix_exp(const Mat<Jet>& x) {
  const Eigen::Index n = x.rows();
  const MatrixXd value = values_of(x);
  int degree = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!x(i, j).is_constant()) degree = std::max(degree, x(i, j).layout()->degree());

  if (value.cwiseAbs().maxCoeff() == 0.0) {
    // Nilpotent argument: the series terminates at the jet degree.
    Mat<Jet> out = Mat<Jet>::Identity(n, n);
    Mat<Jet> term = Mat<Jet>::Identity(n, n);
    for (int k = 1; k <= degree; ++k) {
      term = (term * x) / Jet(static_cast<double>(k));
      out += term;
    }
    return out;
  }
  // General argument: scaling and squaring with a long Taylor series.
  const double norm = value.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (std::ldexp(norm, -squarings) > 0.25) ++squarings;
  const Mat<Jet> scaled = x / Jet(std::ldexp(1.0, squarings));
  Mat<Jet> out = Mat<Jet>::Identity(n, n);
  Mat<Jet> term = Mat<Jet>::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = (term * scaled) / Jet(static_cast<double>(k));
    out += term;
  }
  for (int s = 0; s < squarings; ++s) out = out * out;
  return out;
}

MatrixXd matrix_inverse(const MatrixXd& a) {
  Eigen::FullPivLU<MatrixXd> lu(a);
  if (!lu.isInvertible()) throw NumericError("singular matrix inversion");
  return lu.inverse();
}

Mat<Jet> matrix_inverse(const Mat<Jet>& a) {
  const Eigen::Index n = a.rows();
  const MatrixXd a0inv = matrix_inverse(values_of(a));
  int degree = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!a(i, j).is_constant()) degree = std::max(degree, a(i, j).layout()->degree());
  // a = a0 (I + a0^-1 N)  =>  a^-1 = sum_k (-a0^-1 N)^k a0^-1, terminating at the jet degree.
  Mat<Jet> nil = a;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) nil(i, j) = a(i, j).infinitesimal();
  const Mat<Jet> step = -(a0inv.cast<Jet>() * nil);
  Mat<Jet> out = Mat<Jet>::Identity(n, n);
  Mat<Jet> term = Mat<Jet>::Identity(n, n);
  for (int k = 1; k <= degree; ++k) {
    term = term * step;
    out += term;
  }
  return out * a0inv.cast<Jet>();
}

}  // namespace infogeo
