#pragma once

// Truncated multivariate Taylor values ("jets").
//
// A Jet stores the Taylor coefficients of a smooth function of `nvars`
// variables around a point, truncated at total degree `degree`. Arithmetic on
// jets is exact up to the truncation order, so an evaluator written against a
// generic scalar yields exact mixed partial derivatives when it is run on
// seeded jets.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace infogeo {

/// Monomial bookkeeping shared by all jets of one (nvars, degree) shape.
class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  /// Cached, thread-safe lookup. nvars in [1, 8], degree in [0, 8].
  static std::shared_ptr<const JetLayout> get(int nvars, int degree);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  std::size_t size() const { return monomials_.size(); }

  const std::vector<int>& exponents(std::size_t i) const { return monomials_[i]; }
  int total_degree(std::size_t i) const { return total_degree_[i]; }
  std::size_t index_of(std::span<const int> exponents) const;
  std::size_t variable_index(int var) const;
  const std::vector<Product>& products() const { return products_; }

  JetLayout(int nvars, int degree);

 private:
  int nvars_;
  int degree_;
  std::vector<std::vector<int>> monomials_;
  std::vector<int> total_degree_;
  std::vector<Product> products_;
};

class Jet {
 public:
  Jet() = default;
  Jet(double value) : coeffs_{value} {}  // NOLINT(google-explicit-constructor)
  Jet(int value) : coeffs_{static_cast<double>(value)} {}  // NOLINT

  /// The jet of the coordinate function `var` around `value`.
  static Jet variable(std::shared_ptr<const JetLayout> layout, int var, double value = 0.0);

  double value() const { return coeffs_[0]; }
  bool is_constant() const { return layout_ == nullptr; }
  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }

  /// Taylor coefficient of the monomial with the given exponents.
  double coefficient(std::span<const int> exponents) const;
  /// Mixed partial derivative d^|m| / dx^m at the expansion point.
  double partial(std::span<const int> exponents) const;

  /// Nilpotent part (the jet minus its constant term).
  Jet infinitesimal() const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);

  friend Jet operator-(Jet x);
  friend Jet operator+(const Jet& x) { return x; }
  friend Jet operator*(const Jet& lhs, const Jet& rhs);

  /// f(a + r) = sum_k taylor[k] r^k for a = value(), r nilpotent.
  Jet compose(std::span<const double> taylor) const;

 private:
  void promote(const std::shared_ptr<const JetLayout>& layout);

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> coeffs_{0.0};
};

Jet operator+(Jet lhs, const Jet& rhs);
Jet operator-(Jet lhs, const Jet& rhs);
Jet operator*(const Jet& lhs, const Jet& rhs);
Jet operator/(const Jet& lhs, const Jet& rhs);

// Comparisons look at the value only.
inline bool operator<(const Jet& a, const Jet& b) { return a.value() < b.value(); }
inline bool operator>(const Jet& a, const Jet& b) { return a.value() > b.value(); }
inline bool operator<=(const Jet& a, const Jet& b) { return a.value() <= b.value(); }
inline bool operator>=(const Jet& a, const Jet& b) { return a.value() >= b.value(); }
inline bool operator==(const Jet& a, const Jet& b) { return a.value() == b.value(); }
inline bool operator!=(const Jet& a, const Jet& b) { return a.value() != b.value(); }

Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet pow(const Jet& x, double q);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet inverse(const Jet& x);
bool isfinite(const Jet& x);

std::ostream& operator<<(std::ostream& os, const Jet& x);

/// Scalar-generic helpers so templated evaluators read the same for both towers.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace infogeo

namespace Eigen {

template <>
struct NumTraits<infogeo::Jet> : GenericNumTraits<double> {
  using Real = infogeo::Jet;
  using NonInteger = infogeo::Jet;
  using Nested = infogeo::Jet;
  using Literal = infogeo::Jet;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 64
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<infogeo::Jet, double, BinaryOp> {
  using ReturnType = infogeo::Jet;
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, infogeo::Jet, BinaryOp> {
  using ReturnType = infogeo::Jet;
};

}  // namespace Eigen
