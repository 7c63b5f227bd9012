#pragma once

// Real matrix groups GL(n), U(n), SO(n), SU(n). Complex groups are stored
// through their real 2n x 2n images  A + iB  ->  [[A, -B], [B, A]],  so the
// adjoint becomes the transpose and one real scalar tower suffices.

#include "infogeo/types.hpp"

#include <random>
#include <string>
#include <vector>

namespace infogeo {

enum class GroupKind { GL, U, SO, SU };

class MatrixGroup {
 public:
  MatrixGroup(GroupKind kind, int n);

  GroupKind kind() const { return kind_; }
  int n() const { return n_; }
  bool is_complex() const { return kind_ == GroupKind::U || kind_ == GroupKind::SU; }
  bool is_compact() const { return kind_ != GroupKind::GL; }
  /// Side length of the real matrices representing group elements.
  int matrix_size() const { return is_complex() ? 2 * n_ : n_; }
  int algebra_dim() const { return static_cast<int>(basis_.size()); }
  std::string name() const;

  /// Real images of the Lie-algebra basis.
  const std::vector<MatrixXd>& basis() const { return basis_; }
  const std::vector<std::string>& basis_labels() const { return labels_; }

  /// C[k](i, j) with [B_i, B_j] = sum_k C[k](i, j) B_k.
  const std::vector<MatrixXd>& structure_constants() const { return structure_; }

  /// Basis coordinates of a Lie-algebra element (least squares in the Frobenius product).
  VectorXd coordinates(const MatrixXd& x) const;

  template <class T>
  Mat<T> algebra_element(const Vec<T>& coeffs) const {
    Mat<T> out = Mat<T>::Zero(matrix_size(), matrix_size());
    for (int i = 0; i < algebra_dim(); ++i) out += coeffs[i] * basis_[i].cast<T>();
    return out;
  }

  /// Distance of `a` from the group (0 for members up to roundoff).
  double membership_residual(const MatrixXd& a) const;

  MatrixXd identity() const { return MatrixXd::Identity(matrix_size(), matrix_size()); }
  MatrixXd random_element(std::mt19937& rng, double scale = 1.0) const;

  /// Inverse specialized to the group: transpose for compact groups.
  template <class T>
  Mat<T> inverse(const Mat<T>& a) const;

  static MatrixXd real_image(const Eigen::MatrixXcd& m);

 private:
  GroupKind kind_;
  int n_;
  std::vector<MatrixXd> basis_;
  std::vector<std::string> labels_;
  std::vector<MatrixXd> structure_;
  Eigen::LDLT<MatrixXd> gram_;
};

/// Matrix exponential. Doubles use scaling-and-squaring Pade(13); jets with a
/// nilpotent argument use the truncated series, which is exact at the jet degree.
MatrixXd matrix_exp(const MatrixXd& x);
Mat<Jet> matrix_exp(const Mat<Jet>& x);

/// General inverse. Jets expand around the inverse of the value part.
MatrixXd matrix_inverse(const MatrixXd& a);
Mat<Jet> matrix_inverse(const Mat<Jet>& a);

template <class T>
T trace_of(const Mat<T>& m) {
  T acc(0.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) acc += m(i, i);
  return acc;
}

/// Frobenius product tr(a b^T) without Eigen reductions (valid for jets).
template <class T>
T frobenius(const Mat<T>& a, const Mat<T>& b) {
  T acc(0.0);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += a(i, j) * b(i, j);
  return acc;
}

}  // namespace infogeo
