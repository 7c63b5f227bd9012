#pragma once

#include "infogeo/jet.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace infogeo {

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Scalar = T;

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

/// Raised when an evaluation produces NaN/Inf or a solve is degenerate.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for bad shapes, unknown names and violated preconditions.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One callable instantiated for both scalar towers (double and Jet).
///
/// Constructed from a generic lambda; the jet branch may be left empty for
/// evaluators that only make sense on doubles, in which case calling it with
/// jets throws DomainError.
template <template <class> class In, template <class> class Out>
class Lifted {
 public:
  using RealFn = std::function<Out<double>(const In<double>&)>;
  using JetFn = std::function<Out<Jet>(const In<Jet>&)>;

  Lifted() = default;

  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, Lifted> && std::is_invocable_r_v<Out<double>, F&, const In<double>&>)
  Lifted(F f)  // NOLINT(google-explicit-constructor)
      : real_(f), jet_(std::move(f)) {}

  static Lifted real_only(RealFn f) {
    Lifted l;
    l.real_ = std::move(f);
    return l;
  }

  Out<double> operator()(const In<double>& x) const { return real_(x); }
  Out<Jet> operator()(const In<Jet>& x) const {
    if (!jet_) throw DomainError("evaluator is not jet-liftable");
    return jet_(x);
  }

  bool has_jet() const { return static_cast<bool>(jet_); }
  explicit operator bool() const { return static_cast<bool>(real_); }

 private:
  RealFn real_;
  JetFn jet_;
};

template <class T>
Mat<T> to_scalar(const MatrixXd& m) {
  return m.cast<T>();
}

template <class T>
Vec<T> to_scalar(const VectorXd& v) {
  return v.cast<T>();
}

inline VectorXd values_of(const Vec<Jet>& v) {
  VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i].value();
  return out;
}

inline MatrixXd values_of(const Mat<Jet>& m) {
  MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).value();
  return out;
}

inline const VectorXd& values_of(const VectorXd& v) { return v; }
inline const MatrixXd& values_of(const MatrixXd& m) { return m; }

}  // namespace infogeo
