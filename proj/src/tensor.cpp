#include "infogeo/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace infogeo {

Tensor::Tensor(int order, int dim, double fill) : order_(order), dim_(dim) {
  if (order < 0 || dim < 0) throw DomainError("tensor order and dimension must be nonnegative");
  std::size_t n = 1;
  for (int k = 0; k < order; ++k) n *= static_cast<std::size_t>(dim);
  data_.assign(n, fill);
}

Tensor Tensor::from_matrix(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw DomainError("tensor from a non-square matrix");
  Tensor t(2, static_cast<int>(m.rows()));
  for (int i = 0; i < t.dim_; ++i)
    for (int j = 0; j < t.dim_; ++j) t(i, j) = m(i, j);
  return t;
}

std::size_t Tensor::offset(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != order_) throw DomainError("tensor index has wrong arity");
  std::size_t off = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim_) throw DomainError("tensor index out of range");
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return off;
}

MatrixXd Tensor::as_matrix() const {
  if (order_ != 2) throw DomainError("as_matrix needs an order-2 tensor");
  MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor::symmetry_residual() const {
  double worst = 0.0;
  std::vector<int> perm(static_cast<std::size_t>(order_));
  for_each_index([&](std::span<const int> idx) {
    perm.assign(idx.begin(), idx.end());
    std::sort(perm.begin(), perm.end());
    const double v = at(idx);
    do {
      worst = std::max(worst, std::abs(v - at(perm)));
    } while (std::next_permutation(perm.begin(), perm.end()));
  });
  return worst;
}

Tensor Tensor::symmetrized() const {
  Tensor out(order_, dim_);
  std::vector<int> perm(static_cast<std::size_t>(order_));
  for_each_index([&](std::span<const int> idx) {
    perm.assign(idx.begin(), idx.end());
    std::sort(perm.begin(), perm.end());
    double sum = 0.0;
    int count = 0;
    do {
      sum += at(perm);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.at(idx) = sum / count;
  });
  return out;
}

Tensor& Tensor::operator+=(const Tensor& o) {
  if (o.order_ != order_ || o.dim_ != dim_) throw DomainError("tensor shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
  if (o.order_ != order_ || o.dim_ != dim_) throw DomainError("tensor shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double s, Tensor a) { return a *= s; }

double max_difference(const Tensor& a, const Tensor& b) {
  if (a.order() != b.order() || a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  return (a - b).max_abs();
}

}  // namespace infogeo
