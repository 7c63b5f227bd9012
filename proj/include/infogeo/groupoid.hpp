#pragma once

// Concrete Lie groupoids: matrix groups, pair groupoids (over R^d or over a
// matrix group manifold) and trivialized G-groupoids  G0 x G.
//
// Pair arrows store (first, second) = (target, source). Points of a family are
// flat coordinate vectors: empty for matrix groups, column-major matrices for
// pair groupoids over a group, and [base coords, vec(gamma)] for trivialized
// families. Fiber vectors are coefficients in the family's standard basis.

#include "infogeo/jet_engine.hpp"
#include "infogeo/matrix_group.hpp"

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace infogeo {

struct BasePoint {
  std::string chart_id;
  VectorXd coords;
};

struct AlgebroidVector {
  BasePoint base;
  VectorXd fiber;
};

template <class T>
struct MatrixArrow {
  using scalar_type = T;
  Mat<T> value;
};

template <class T>
struct PairArrow {
  using scalar_type = T;
  Vec<T> first;   // target
  Vec<T> second;  // source
};

template <class T>
using BaseArrow = std::variant<MatrixArrow<T>, PairArrow<T>>;

template <class T>
struct TrivializedArrow {
  using scalar_type = T;
  BaseArrow<T> base;
  Mat<T> group;
};

template <class T>
using Arrow = std::variant<MatrixArrow<T>, PairArrow<T>, TrivializedArrow<T>>;

/// Scalar type (double or Jet) carried by an arrow variant.
template <class V>
using arrow_scalar_t = typename std::variant_alternative_t<0, V>::scalar_type;

class PairGroupoid {
 public:
  static PairGroupoid euclidean(int d, std::string chart_id = {});
  static PairGroupoid over_group(MatrixGroup group);

  const std::string& chart_id() const { return chart_id_; }
  /// Length of point coordinate vectors.
  int dimension() const;
  /// Dimension of the algebroid fiber.
  int rank() const;
  const std::optional<MatrixGroup>& group() const { return group_; }

  /// Moves `point` along fiber direction `v` by `s`: x + s v, or p exp(s V).
  template <class T>
  Vec<T> translate(const Vec<T>& point, const Vec<T>& v, const T& s) const;

 private:
  PairGroupoid() = default;
  int d_ = 0;
  std::optional<MatrixGroup> group_;
  std::string chart_id_;
};

using BaseFamily = std::variant<MatrixGroup, PairGroupoid>;
using Morphism = Lifted<BaseArrow, Mat>;

struct TrivializedG {
  BaseFamily base;
  MatrixGroup structure;
  /// Groupoid morphism b: base -> structure group.
  Morphism b;
};

using GroupoidFamily = std::variant<MatrixGroup, PairGroupoid, TrivializedG>;

/// b = id for a matrix-group base whose structure group is the same group.
Morphism identity_morphism();
/// b(m, m') = h(m) h(m')^-1 with h(m) = exp(sum_i (W m)_i B_i) over a Euclidean pair base.
Morphism coboundary_morphism(const MatrixGroup& structure, const MatrixXd& w);

std::string describe(const GroupoidFamily& family);
std::string chart_id(const GroupoidFamily& family);
int base_dimension(const GroupoidFamily& family);
int algebroid_rank(const GroupoidFamily& family);
std::vector<std::string> basis_labels(const GroupoidFamily& family);

template <class T>
Arrow<T> unit_embed(const GroupoidFamily& family, const Vec<T>& x);
template <class T>
Arrow<T> compose(const GroupoidFamily& family, const Arrow<T>& g, const Arrow<T>& h);
template <class T>
Arrow<T> inverse(const GroupoidFamily& family, const Arrow<T>& g);
template <class T>
Vec<T> source(const GroupoidFamily& family, const Arrow<T>& g);
template <class T>
Vec<T> target(const GroupoidFamily& family, const Arrow<T>& g);

/// Curve s -> arrow in the target fiber of x with velocity v at s = 0 (a left probe step).
template <class T>
Arrow<T> left_step(const GroupoidFamily& family, const Vec<T>& x, const Vec<T>& v, const T& s);

/// Checked entry points on doubles.
Arrow<double> unit_embed(const GroupoidFamily& family, const BasePoint& x);
void check_point(const GroupoidFamily& family, const BasePoint& x);
void validate_arrow(const GroupoidFamily& family, const Arrow<double>& g, double tol = 1e-10);

/// Flat coordinates of an arrow; used for distances and tangent vectors.
template <class T>
Vec<T> arrow_coordinates(const Arrow<T>& g);
double arrow_distance(const Arrow<double>& a, const Arrow<double>& b);

/// Anchor matrix at x: column i is the base tangent of the source curve along e_i.
MatrixXd anchor_matrix(const GroupoidFamily& family, const VectorXd& x);

VectorXd sample_point(const GroupoidFamily& family, std::mt19937& rng);
/// Random arrow whose source is x.
Arrow<double> sample_arrow_from(const GroupoidFamily& family, const VectorXd& x, std::mt19937& rng);
Arrow<double> sample_arrow(const GroupoidFamily& family, std::mt19937& rng);

/// Fiber-coefficient field over base point coordinates.
using Section = Lifted<Vec, Vec>;
Section constant_section(VectorXd fiber);

using ArrowFunction = Lifted<Arrow, Scalar>;

/// Realizes X_1^L ... X_p^L Z_1^R ... Z_q^R (.) at the unit over x as a
/// mixed (1,...,1) partial in p + q curve parameters. Each parameter drives
/// its own nested translation, so non-constant sections are handled exactly.
class ProbeFactory {
 public:
  ProbeFactory(std::shared_ptr<const GroupoidFamily> family, VectorXd x, std::vector<Section> lefts,
               std::vector<Section> rights, bool rights_first = false);

  int arity() const { return static_cast<int>(lefts_.size() + rights_.size()); }
  const GroupoidFamily& family() const { return *family_; }

  /// Parameters ordered (s_1..s_p, u_1..u_q).
  template <class T>
  Arrow<T> arrow(const Vec<T>& params) const;

  ProbeFunction apply(ArrowFunction f) const;

  /// The (1,...,1) mixed partial of f along this probe.
  double derivative(const ArrowFunction& f, DiffMethod method = DiffMethod::taylor_jet) const;

 private:
  std::shared_ptr<const GroupoidFamily> family_;
  VectorXd x_;
  std::vector<Section> lefts_;
  std::vector<Section> rights_;
  bool rights_first_;
};

ProbeFactory probe_arrow(const GroupoidFamily& family, const BasePoint& x, const std::vector<AlgebroidVector>& lefts,
                         const std::vector<AlgebroidVector>& rights);

}  // namespace infogeo
