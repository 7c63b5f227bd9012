#pragma once

#include "infogeo/types.hpp"

#include <span>
#include <vector>

namespace infogeo {

/// Dense array of a given order with every index ranging over [0, dim).
class Tensor {
 public:
  Tensor() = default;
  Tensor(int order, int dim, double fill = 0.0);

  static Tensor from_matrix(const MatrixXd& m);

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double& at(std::span<const int> idx) { return data_[offset(idx)]; }
  double at(std::span<const int> idx) const { return data_[offset(idx)]; }

  template <class... I>
  double& operator()(I... i) {
    const int idx[] = {static_cast<int>(i)...};
    return at(idx);
  }
  template <class... I>
  double operator()(I... i) const {
    const int idx[] = {static_cast<int>(i)...};
    return at(idx);
  }

  /// Order-2 view as a matrix.
  MatrixXd as_matrix() const;

  double max_abs() const;
  /// max |t(idx) - t(sigma idx)| over all index permutations sigma.
  double symmetry_residual() const;
  Tensor symmetrized() const;

  Tensor& operator+=(const Tensor& o);
  Tensor& operator-=(const Tensor& o);
  Tensor& operator*=(double s);

  /// Calls f(idx) for every multi-index in row-major order.
  template <class F>
  void for_each_index(F&& f) const {
    std::vector<int> idx(static_cast<std::size_t>(order_), 0);
    for (std::size_t n = 0; n < data_.size(); ++n) {
      f(std::span<const int>(idx));
      for (int k = order_ - 1; k >= 0; --k) {
        if (++idx[k] < dim_) break;
        idx[k] = 0;
      }
    }
  }

 private:
  std::size_t offset(std::span<const int> idx) const;

  int order_ = 0;
  int dim_ = 0;
  std::vector<double> data_{0.0};
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);

/// Maximum entrywise distance; infinite for mismatched shapes.
double max_difference(const Tensor& a, const Tensor& b);

}  // namespace infogeo
