#include "infogeo/groupoid.hpp"

#include <cmath>
#include <sstream>

namespace infogeo {

namespace {

template <class T>
Vec<T> flatten(const Mat<T>& m) {
  Vec<T> out(m.size());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[j * m.rows() + i] = m(i, j);
  return out;
}

template <class T>
Mat<T> unflatten(const Vec<T>& v, Eigen::Index offset, int m) {
  Mat<T> out(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) out(i, j) = v[offset + j * m + i];
  return out;
}

template <class T>
Vec<T> concat(const Vec<T>& a, const Vec<T>& b) {
  Vec<T> out(a.size() + b.size());
  out << a, b;
  return out;
}

template <class T>
double max_value_gap(const Vec<T>& a, const Vec<T>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const VectorXd da = values_of(a);
  const VectorXd db = values_of(b);
  if (a.size() == 0) return 0.0;
  return (da - db).cwiseAbs().maxCoeff() / std::max(1.0, da.cwiseAbs().maxCoeff());
}

template <class T>
void check_composable(const Vec<T>& src, const Vec<T>& tgt) {
  if (!(max_value_gap(src, tgt) <= 1e-10)) throw DomainError("non-composable arrows: source(g) != target(h)");
}

template <class A, class V>
const A& as(const V& v) {
  if (const A* p = std::get_if<A>(&v)) return *p;
  throw DomainError("arrow variant does not match the groupoid family");
}

// Matrix groups act as groupoids over a single point.
struct MatrixOps {
  const MatrixGroup& g;

  template <class T>
  MatrixArrow<T> unit() const {
    return {Mat<T>(g.identity().cast<T>())};
  }
  template <class T>
  MatrixArrow<T> compose(const MatrixArrow<T>& a, const MatrixArrow<T>& b) const {
    return {Mat<T>(a.value * b.value)};
  }
  template <class T>
  MatrixArrow<T> inverse(const MatrixArrow<T>& a) const {
    return {g.inverse(a.value)};
  }
  template <class T>
  MatrixArrow<T> left_step(const Vec<T>& v, const T& s) const {
    return {matrix_exp(Mat<T>(g.algebra_element(v) * s))};
  }
};

struct PairOps {
  const PairGroupoid& p;

  template <class T>
  PairArrow<T> unit(const Vec<T>& x) const {
    return {x, x};
  }
  template <class T>
  PairArrow<T> compose(const PairArrow<T>& a, const PairArrow<T>& b) const {
    check_composable(a.second, b.first);
    return {a.first, b.second};
  }
  template <class T>
  PairArrow<T> inverse(const PairArrow<T>& a) const {
    return {a.second, a.first};
  }
  template <class T>
  PairArrow<T> left_step(const Vec<T>& x, const Vec<T>& v, const T& s) const {
    return {x, p.translate(x, v, s)};
  }
};

template <class T>
BaseArrow<T> base_unit(const BaseFamily& f, const Vec<T>& x) {
  if (auto* m = std::get_if<MatrixGroup>(&f)) return MatrixOps{*m}.unit<T>();
  return PairOps{std::get<PairGroupoid>(f)}.unit(x);
}

template <class T>
BaseArrow<T> base_compose(const BaseFamily& f, const BaseArrow<T>& a, const BaseArrow<T>& b) {
  if (auto* m = std::get_if<MatrixGroup>(&f)) {
    return MatrixOps{*m}.compose(as<MatrixArrow<T>>(a), as<MatrixArrow<T>>(b));
  }
  return PairOps{std::get<PairGroupoid>(f)}.compose(as<PairArrow<T>>(a), as<PairArrow<T>>(b));
}

template <class T>
BaseArrow<T> base_inverse(const BaseFamily& f, const BaseArrow<T>& a) {
  if (auto* m = std::get_if<MatrixGroup>(&f)) return MatrixOps{*m}.inverse(as<MatrixArrow<T>>(a));
  return PairOps{std::get<PairGroupoid>(f)}.inverse(as<PairArrow<T>>(a));
}

template <class T>
Vec<T> base_source(const BaseFamily& f, const BaseArrow<T>& a) {
  if (std::holds_alternative<MatrixGroup>(f)) {
    as<MatrixArrow<T>>(a);
    return Vec<T>(0);
  }
  return as<PairArrow<T>>(a).second;
}

template <class T>
Vec<T> base_target(const BaseFamily& f, const BaseArrow<T>& a) {
  if (std::holds_alternative<MatrixGroup>(f)) {
    as<MatrixArrow<T>>(a);
    return Vec<T>(0);
  }
  return as<PairArrow<T>>(a).first;
}

template <class T>
BaseArrow<T> base_left_step(const BaseFamily& f, const Vec<T>& x, const Vec<T>& v, const T& s) {
  if (auto* m = std::get_if<MatrixGroup>(&f)) return MatrixOps{*m}.left_step(v, s);
  return PairOps{std::get<PairGroupoid>(f)}.left_step(x, v, s);
}

int base_dim(const BaseFamily& f) {
  if (auto* p = std::get_if<PairGroupoid>(&f)) return p->dimension();
  return 0;
}

int base_rank(const BaseFamily& f) {
  if (auto* p = std::get_if<PairGroupoid>(&f)) return p->rank();
  return std::get<MatrixGroup>(f).algebra_dim();
}

BaseFamily as_base(const GroupoidFamily& f) {
  if (auto* m = std::get_if<MatrixGroup>(&f)) return *m;
  return std::get<PairGroupoid>(f);
}

template <class T>
Arrow<T> lift(const BaseArrow<T>& a) {
  return std::visit([](const auto& x) -> Arrow<T> { return x; }, a);
}

template <class T>
BaseArrow<T> lower(const Arrow<T>& a) {
  if (auto* m = std::get_if<MatrixArrow<T>>(&a)) return *m;
  if (auto* p = std::get_if<PairArrow<T>>(&a)) return *p;
  throw DomainError("arrow variant does not match the groupoid family");
}

struct TrivOps {
  const TrivializedG& t;

  int d0() const { return base_dim(t.base); }
  int k() const { return t.structure.matrix_size(); }

  template <class T>
  Vec<T> base_part(const Vec<T>& x) const {
    return x.head(d0());
  }
  template <class T>
  Mat<T> group_part(const Vec<T>& x) const {
    return unflatten(x, d0(), k());
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// PairGroupoid

PairGroupoid PairGroupoid::euclidean(int d, std::string chart_id) {
  if (d < 1) throw DomainError("pair groupoid dimension must be positive");
  PairGroupoid p;
  p.d_ = d;
  p.chart_id_ = chart_id.empty() ? "R^" + std::to_string(d) : std::move(chart_id);
  return p;
}

PairGroupoid PairGroupoid::over_group(MatrixGroup group) {
  PairGroupoid p;
  p.d_ = group.matrix_size() * group.matrix_size();
  p.chart_id_ = group.name();
  p.group_ = std::move(group);
  return p;
}

int PairGroupoid::dimension() const { return d_; }

int PairGroupoid::rank() const { return group_ ? group_->algebra_dim() : d_; }

template <class T>
Vec<T> PairGroupoid::translate(const Vec<T>& point, const Vec<T>& v, const T& s) const {
  if (!group_) return point + v * s;
  const int m = group_->matrix_size();
  const Mat<T> p = unflatten(point, 0, m);
  return flatten(Mat<T>(p * matrix_exp(Mat<T>(group_->algebra_element(v) * s))));
}

template Vec<double> PairGroupoid::translate(const Vec<double>&, const Vec<double>&, const double&) const;
template Vec<Jet> PairGroupoid::translate(const Vec<Jet>&, const Vec<Jet>&, const Jet&) const;

// ---------------------------------------------------------------------------
// Morphisms


Morphism identity_morphism() {
  return Morphism([](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    return as<MatrixArrow<T>>(a).value;
  });
}

Morphism coboundary_morphism(const MatrixGroup& structure, const MatrixXd& w) {
  if (w.rows() != structure.algebra_dim()) throw DomainError("coboundary weight rows must match the algebra dimension");
  return Morphism([structure, w](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const auto& p = as<PairArrow<T>>(a);
    auto h = [&](const Vec<T>& m) {
      const Vec<T> c = w.cast<T>() * m;
      return matrix_exp(structure.algebra_element(c));
    };
    return Mat<T>(h(p.first) * structure.inverse(h(p.second)));
  });
}

// ---------------------------------------------------------------------------
// Family metadata

std::string chart_id(const GroupoidFamily& family) {
  if (std::holds_alternative<MatrixGroup>(family)) return "pt";
  if (auto* p = std::get_if<PairGroupoid>(&family)) return p->chart_id();
  const auto& t = std::get<TrivializedG>(family);
  const std::string base = std::holds_alternative<MatrixGroup>(t.base) ? "pt" : std::get<PairGroupoid>(t.base).chart_id();
  return base + " x " + t.structure.name();
}

std::string describe(const GroupoidFamily& family) {
  if (auto* m = std::get_if<MatrixGroup>(&family)) return m->name();
  if (auto* p = std::get_if<PairGroupoid>(&family)) return "pair groupoid over " + p->chart_id();
  const auto& t = std::get<TrivializedG>(family);
  const std::string base = std::visit(
      [](const auto& b) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, MatrixGroup>) return b.name();
        else return "pair groupoid over " + b.chart_id();
      },
      t.base);
  return "trivialized " + t.structure.name() + "-groupoid over " + base;
}

int base_dimension(const GroupoidFamily& family) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    return base_dim(t->base) + t->structure.matrix_size() * t->structure.matrix_size();
  }
  return base_dim(as_base(family));
}

int algebroid_rank(const GroupoidFamily& family) {
  if (auto* t = std::get_if<TrivializedG>(&family)) return base_rank(t->base);
  return base_rank(as_base(family));
}

std::vector<std::string> basis_labels(const GroupoidFamily& family) {
  const BaseFamily base = std::holds_alternative<TrivializedG>(family) ? std::get<TrivializedG>(family).base
                                                                         : as_base(family);
  if (auto* m = std::get_if<MatrixGroup>(&base)) return m->basis_labels();
  const auto& p = std::get<PairGroupoid>(base);
  if (p.group()) return p.group()->basis_labels();
  std::vector<std::string> out;
  for (int i = 0; i < p.rank(); ++i) out.push_back("d" + std::to_string(i + 1));
  return out;
}

// ---------------------------------------------------------------------------
// Structure maps

template <class T>
Arrow<T> unit_embed(const GroupoidFamily& family, const Vec<T>& x) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    TrivOps ops{*t};
    return TrivializedArrow<T>{base_unit(t->base, ops.base_part(x)), ops.group_part(x)};
  }
  return lift(base_unit(as_base(family), x));
}

template <class T>
Arrow<T> compose(const GroupoidFamily& family, const Arrow<T>& g, const Arrow<T>& h) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    const auto& a = as<TrivializedArrow<T>>(g);
    const auto& b = as<TrivializedArrow<T>>(h);
    // (a, gamma)(a', gamma') = (a a', gamma') with gamma = b(a') gamma'.
    check_composable(flatten(a.group), flatten(Mat<T>(t->b(b.base) * b.group)));
    return TrivializedArrow<T>{base_compose(t->base, a.base, b.base), b.group};
  }
  return lift(base_compose(as_base(family), lower(g), lower(h)));
}

template <class T>
Arrow<T> inverse(const GroupoidFamily& family, const Arrow<T>& g) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    const auto& a = as<TrivializedArrow<T>>(g);
    return TrivializedArrow<T>{base_inverse(t->base, a.base), Mat<T>(t->b(a.base) * a.group)};
  }
  return lift(base_inverse(as_base(family), lower(g)));
}

template <class T>
Vec<T> source(const GroupoidFamily& family, const Arrow<T>& g) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    const auto& a = as<TrivializedArrow<T>>(g);
    return concat(base_source(t->base, a.base), flatten(a.group));
  }
  return base_source(as_base(family), lower(g));
}

template <class T>
Vec<T> target(const GroupoidFamily& family, const Arrow<T>& g) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    const auto& a = as<TrivializedArrow<T>>(g);
    return concat(base_target(t->base, a.base), flatten(Mat<T>(t->b(a.base) * a.group)));
  }
  return base_target(as_base(family), lower(g));
}

template <class T>
Arrow<T> left_step(const GroupoidFamily& family, const Vec<T>& x, const Vec<T>& v, const T& s) {
  if (v.size() != algebroid_rank(family)) throw DomainError("fiber vector length does not match the algebroid rank");
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    TrivOps ops{*t};
    BaseArrow<T> e = base_left_step(t->base, ops.base_part(x), v, s);
    Mat<T> gamma = t->structure.inverse(Mat<T>(t->b(e))) * ops.group_part(x);
    return TrivializedArrow<T>{std::move(e), std::move(gamma)};
  }
  return lift(base_left_step(as_base(family), x, v, s));
}

template <class T>
Vec<T> arrow_coordinates(const Arrow<T>& g) {
  return std::visit(
      [](const auto& a) -> Vec<T> {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, MatrixArrow<T>>) {
          return flatten(a.value);
        } else if constexpr (std::is_same_v<A, PairArrow<T>>) {
          return concat(a.first, a.second);
        } else {
          return concat(arrow_coordinates(lift(a.base)), flatten(a.group));
        }
      },
      g);
}

#define INFOGEO_INSTANTIATE(T)                                                                    \
  template Arrow<T> unit_embed(const GroupoidFamily&, const Vec<T>&);                            \
  template Arrow<T> compose(const GroupoidFamily&, const Arrow<T>&, const Arrow<T>&);            \
  template Arrow<T> inverse(const GroupoidFamily&, const Arrow<T>&);                             \
  template Vec<T> source(const GroupoidFamily&, const Arrow<T>&);                                \
  template Vec<T> target(const GroupoidFamily&, const Arrow<T>&);                                \
  template Arrow<T> left_step(const GroupoidFamily&, const Vec<T>&, const Vec<T>&, const T&);    \
  template Vec<T> arrow_coordinates(const Arrow<T>&);
INFOGEO_INSTANTIATE(double)
INFOGEO_INSTANTIATE(Jet)
#undef INFOGEO_INSTANTIATE

double arrow_distance(const Arrow<double>& a, const Arrow<double>& b) {
  if (a.index() != b.index()) return std::numeric_limits<double>::infinity();
  const VectorXd ca = arrow_coordinates(a);
  const VectorXd cb = arrow_coordinates(b);
  if (ca.size() != cb.size()) return std::numeric_limits<double>::infinity();
  return ca.size() == 0 ? 0.0 : (ca - cb).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Checked entry points

void check_point(const GroupoidFamily& family, const BasePoint& x) {
  const int d = base_dimension(family);
  if (x.coords.size() != d) {
    throw DomainError("base point has " + std::to_string(x.coords.size()) + " coordinates, chart '" +
                      chart_id(family) + "' has dimension " + std::to_string(d));
  }
  if (!x.chart_id.empty() && x.chart_id != chart_id(family)) {
    throw DomainError("base point chart '" + x.chart_id + "' does not match '" + chart_id(family) + "'");
  }
  if (!x.coords.allFinite()) throw DomainError("base point has non-finite coordinates");
}

Arrow<double> unit_embed(const GroupoidFamily& family, const BasePoint& x) {
  check_point(family, x);
  return unit_embed(family, Vec<double>(x.coords));
}

namespace {

void validate_base_arrow(const BaseFamily& f, const BaseArrow<double>& a, double tol) {
  if (auto* m = std::get_if<MatrixGroup>(&f)) {
    const double r = m->membership_residual(as<MatrixArrow<double>>(a).value);
    if (!(r <= tol)) {
      std::ostringstream os;
      os << "matrix arrow is not in " << m->name() << " (residual " << r << ")";
      throw DomainError(os.str());
    }
    return;
  }
  const auto& p = std::get<PairGroupoid>(f);
  const auto& pa = as<PairArrow<double>>(a);
  if (pa.first.size() != p.dimension() || pa.second.size() != p.dimension()) {
    throw DomainError("pair arrow points do not match the chart dimension");
  }
  if (p.group()) {
    const int m = p.group()->matrix_size();
    for (const VectorXd* v : {&pa.first, &pa.second}) {
      if (!(p.group()->membership_residual(unflatten(*v, 0, m)) <= tol)) {
        throw DomainError("pair arrow point is not in " + p.group()->name());
      }
    }
  }
}

}  // namespace

void validate_arrow(const GroupoidFamily& family, const Arrow<double>& g, double tol) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    const auto& a = as<TrivializedArrow<double>>(g);
    validate_base_arrow(t->base, a.base, tol);
    if (!(t->structure.membership_residual(a.group) <= tol)) {
      throw DomainError("group component is not in " + t->structure.name());
    }
    return;
  }
  validate_base_arrow(as_base(family), lower(g), tol);
}

MatrixXd anchor_matrix(const GroupoidFamily& family, const VectorXd& x) {
  const int r = algebroid_rank(family);
  const int d = base_dimension(family);
  MatrixXd out(d, r);
  auto layout = JetLayout::get(1, 1);
  const Jet s = Jet::variable(layout, 0);
  const Vec<Jet> xj = x.cast<Jet>();
  const int first[] = {1};
  for (int i = 0; i < r; ++i) {
    const Vec<Jet> v = VectorXd::Unit(r, i).cast<Jet>();
    const Vec<Jet> src = source(family, left_step(family, xj, v, s));
    for (int k = 0; k < d; ++k) out(k, i) = src[k].partial(first);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

VectorXd sample_base_point(const BaseFamily& f, std::mt19937& rng) {
  if (std::holds_alternative<MatrixGroup>(f)) return VectorXd(0);
  const auto& p = std::get<PairGroupoid>(f);
  if (p.group()) return flatten(MatrixXd(p.group()->random_element(rng)));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd x(p.dimension());
  for (auto& c : x) c = u(rng);
  return x;
}

BaseArrow<double> sample_base_arrow_from(const BaseFamily& f, const VectorXd& x, std::mt19937& rng) {
  if (auto* m = std::get_if<MatrixGroup>(&f)) return MatrixArrow<double>{m->random_element(rng)};
  return PairArrow<double>{sample_base_point(f, rng), x};
}

}  // namespace

VectorXd sample_point(const GroupoidFamily& family, std::mt19937& rng) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    return concat<double>(sample_base_point(t->base, rng), flatten(MatrixXd(t->structure.random_element(rng))));
  }
  return sample_base_point(as_base(family), rng);
}

Arrow<double> sample_arrow_from(const GroupoidFamily& family, const VectorXd& x, std::mt19937& rng) {
  if (auto* t = std::get_if<TrivializedG>(&family)) {
    TrivOps ops{*t};
    return TrivializedArrow<double>{sample_base_arrow_from(t->base, ops.base_part(x), rng), ops.group_part(x)};
  }
  return lift(sample_base_arrow_from(as_base(family), x, rng));
}

Arrow<double> sample_arrow(const GroupoidFamily& family, std::mt19937& rng) {
  const VectorXd x = sample_point(family, rng);
  return sample_arrow_from(family, x, rng);
}

// ---------------------------------------------------------------------------
// Probes

Section constant_section(VectorXd fiber) {
  return Section([fiber = std::move(fiber)](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    return Vec<T>(fiber.cast<T>());
  });
}

ProbeFactory::ProbeFactory(std::shared_ptr<const GroupoidFamily> family, VectorXd x, std::vector<Section> lefts,
                           std::vector<Section> rights, bool rights_first)
    : family_(std::move(family)),
      x_(std::move(x)),
      lefts_(std::move(lefts)),
      rights_(std::move(rights)),
      rights_first_(rights_first) {
  if (x_.size() != base_dimension(*family_)) throw DomainError("probe base point dimension mismatch");
}

template <class T>
Arrow<T> ProbeFactory::arrow(const Vec<T>& params) const {
  const GroupoidFamily& fam = *family_;
  const std::size_t p = lefts_.size();
  Arrow<T> g = unit_embed(fam, Vec<T>(x_.cast<T>()));
  auto apply_lefts = [&] {
    for (std::size_t i = 0; i < p; ++i) {
      const Vec<T> src = source(fam, g);
      g = compose(fam, g, left_step(fam, src, lefts_[i](src), params[i]));
    }
  };
  // Each right step is prepended, so Z_1 ends up innermost: exp(u_q Z_q) ... exp(u_1 Z_1) g.
  auto apply_rights = [&] {
    for (std::size_t j = 0; j < rights_.size(); ++j) {
      const Vec<T> tgt = target(fam, g);
      const T u = -params[p + j];
      g = compose(fam, inverse(fam, left_step(fam, tgt, rights_[j](tgt), u)), g);
    }
  };
  if (rights_first_) {
    apply_rights();
    apply_lefts();
  } else {
    apply_lefts();
    apply_rights();
  }
  return g;
}

template Arrow<double> ProbeFactory::arrow(const Vec<double>&) const;
template Arrow<Jet> ProbeFactory::arrow(const Vec<Jet>&) const;

ProbeFunction ProbeFactory::apply(ArrowFunction f) const {
  auto self = std::make_shared<const ProbeFactory>(*this);
  return {arity(), Lifted<Vec, Scalar>([self, f = std::move(f)](const auto& s) { return f(self->arrow(s)); })};
}

double ProbeFactory::derivative(const ArrowFunction& f, DiffMethod method) const {
  if (arity() == 0) return f(arrow(VectorXd(0)));
  return mixed_partial(apply(f), {std::vector<int>(arity(), 1), method, std::nullopt});
}

ProbeFactory probe_arrow(const GroupoidFamily& family, const BasePoint& x, const std::vector<AlgebroidVector>& lefts,
                         const std::vector<AlgebroidVector>& rights) {
  check_point(family, x);
  const int r = algebroid_rank(family);
  auto sections = [&](const std::vector<AlgebroidVector>& vs) {
    std::vector<Section> out;
    for (const auto& v : vs) {
      if (v.base.coords.size() != x.coords.size() || !(v.base.coords.array() == x.coords.array()).all() ||
          v.base.chart_id != x.chart_id) {
        throw DomainError("probe vectors must all be based at the probe point");
      }
      if (v.fiber.size() != r) throw DomainError("probe vector rank does not match the algebroid rank");
      out.push_back(constant_section(v.fiber));
    }
    return out;
  };
  return ProbeFactory(std::make_shared<const GroupoidFamily>(family), x.coords, sections(lefts), sections(rights));
}

}  // namespace infogeo
