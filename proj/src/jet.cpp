#include "infogeo/jet.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>

namespace infogeo {

namespace {

void enumerate(int nvars, int remaining, int var, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
  if (var == nvars) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[var] = e;
    enumerate(nvars, remaining - e, var + 1, current, out);
  }
  current[var] = 0;
}

int sum_of(const std::vector<int>& v) {
  int s = 0;
  for (int e : v) s += e;
  return s;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

JetLayout::JetLayout(int nvars, int degree) : nvars_(nvars), degree_(degree) {
  std::vector<std::vector<int>> all;
  std::vector<int> current(nvars, 0);
  enumerate(nvars, degree, 0, current, all);
  // Graded order: constant term first, then by total degree.
  for (int d = 0; d <= degree; ++d) {
    for (const auto& m : all) {
      if (sum_of(m) == d) {
        monomials_.push_back(m);
        total_degree_.push_back(d);
      }
    }
  }
  std::map<std::vector<int>, std::uint32_t> index;
  for (std::size_t i = 0; i < monomials_.size(); ++i) index.emplace(monomials_[i], static_cast<std::uint32_t>(i));
  std::vector<int> sum(nvars);
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    for (std::size_t j = 0; j < monomials_.size(); ++j) {
      if (total_degree_[i] + total_degree_[j] > degree) continue;
      for (int v = 0; v < nvars; ++v) sum[v] = monomials_[i][v] + monomials_[j][v];
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), index.at(sum)});
    }
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int degree) {
  if (nvars < 1 || nvars > 8 || degree < 0 || degree > 8) {
    throw std::invalid_argument("jet layout out of range: nvars=" + std::to_string(nvars) +
                                " degree=" + std::to_string(degree));
  }
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{nvars, degree}];
  if (!slot) slot = std::make_shared<const JetLayout>(nvars, degree);
  return slot;
}

std::size_t JetLayout::index_of(std::span<const int> exponents) const {
  if (static_cast<int>(exponents.size()) != nvars_) throw std::invalid_argument("exponent arity mismatch");
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    bool same = true;
    for (int v = 0; v < nvars_ && same; ++v) same = monomials_[i][v] == exponents[v];
    if (same) return i;
  }
  return monomials_.size();
}

std::size_t JetLayout::variable_index(int var) const {
  std::vector<int> e(nvars_, 0);
  e.at(var) = 1;
  return index_of(e);
}

Jet Jet::variable(std::shared_ptr<const JetLayout> layout, int var, double value) {
  Jet x;
  x.layout_ = std::move(layout);
  x.coeffs_.assign(x.layout_->size(), 0.0);
  x.coeffs_[0] = value;
  if (x.layout_->degree() >= 1) x.coeffs_[x.layout_->variable_index(var)] = 1.0;
  return x;
}

double Jet::coefficient(std::span<const int> exponents) const {
  int total = 0;
  for (int e : exponents) total += e;
  if (total == 0) return coeffs_[0];
  if (!layout_) return 0.0;
  std::size_t i = layout_->index_of(exponents);
  return i < coeffs_.size() ? coeffs_[i] : 0.0;
}

double Jet::partial(std::span<const int> exponents) const {
  if (layout_) {
    int total = 0;
    for (int e : exponents) total += e;
    if (total > layout_->degree()) {
      throw std::invalid_argument("requested derivative order exceeds jet degree");
    }
  }
  double scale = 1.0;
  for (int e : exponents) scale *= factorial(e);
  return coefficient(exponents) * scale;
}

Jet Jet::infinitesimal() const {
  Jet r = *this;
  r.coeffs_[0] = 0.0;
  return r;
}

void Jet::promote(const std::shared_ptr<const JetLayout>& layout) {
  if (layout_ == layout || !layout) return;
  if (layout_) throw std::logic_error("mixing jets of different layouts");
  double c = coeffs_[0];
  layout_ = layout;
  coeffs_.assign(layout_->size(), 0.0);
  coeffs_[0] = c;
}

Jet& Jet::operator+=(const Jet& rhs) {
  if (rhs.is_constant()) {
    coeffs_[0] += rhs.coeffs_[0];
    return *this;
  }
  promote(rhs.layout_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  if (rhs.is_constant()) {
    coeffs_[0] -= rhs.coeffs_[0];
    return *this;
  }
  promote(rhs.layout_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) {
  *this = *this * rhs;
  return *this;
}

Jet& Jet::operator/=(const Jet& rhs) {
  *this = *this / rhs;
  return *this;
}

Jet operator-(Jet x) {
  for (double& c : x.coeffs_) c = -c;
  return x;
}

Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }

Jet operator*(const Jet& lhs, const Jet& rhs) {
  if (rhs.is_constant()) {
    Jet out = lhs;
    for (double& c : out.coeffs_) c *= rhs.coeffs_[0];
    return out;
  }
  if (lhs.is_constant()) {
    Jet out = rhs;
    for (double& c : out.coeffs_) c *= lhs.coeffs_[0];
    return out;
  }
  if (lhs.layout_ != rhs.layout_) throw std::logic_error("mixing jets of different layouts");
  Jet out;
  out.layout_ = lhs.layout_;
  out.coeffs_.assign(lhs.coeffs_.size(), 0.0);
  for (const auto& t : lhs.layout_->products()) out.coeffs_[t.out] += lhs.coeffs_[t.lhs] * rhs.coeffs_[t.rhs];
  return out;
}

Jet operator/(const Jet& lhs, const Jet& rhs) {
  if (rhs.is_constant()) return lhs * Jet(1.0 / rhs.value());
  return lhs * inverse(rhs);
}

Jet Jet::compose(std::span<const double> taylor) const {
  if (!layout_) return Jet(taylor[0]);
  const Jet r = infinitesimal();
  const int degree = layout_->degree();
  Jet result(taylor[static_cast<std::size_t>(degree)]);
  for (int k = degree - 1; k >= 0; --k) {
    result = result * r;
    result += Jet(taylor[static_cast<std::size_t>(k)]);
  }
  return result;
}

namespace {

int degree_of(const Jet& x) { return x.is_constant() ? 0 : x.layout()->degree(); }

}  // namespace

Jet exp(const Jet& x) {
  const int d = degree_of(x);
  std::vector<double> t(d + 1);
  const double e = std::exp(x.value());
  for (int k = 0; k <= d; ++k) t[k] = e / factorial(k);
  return x.compose(t);
}

Jet log(const Jet& x) {
  const int d = degree_of(x);
  const double a = x.value();
  std::vector<double> t(d + 1);
  t[0] = std::log(a);
  for (int k = 1; k <= d; ++k) t[k] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(a, k));
  return x.compose(t);
}

Jet pow(const Jet& x, double q) {
  const int d = degree_of(x);
  const double a = x.value();
  std::vector<double> t(d + 1);
  double binom = 1.0;
  for (int k = 0; k <= d; ++k) {
    t[k] = binom * std::pow(a, q - k);
    binom *= (q - k) / (k + 1);
  }
  return x.compose(t);
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

Jet inverse(const Jet& x) {
  const int d = degree_of(x);
  const double a = x.value();
  std::vector<double> t(d + 1);
  for (int k = 0; k <= d; ++k) t[k] = ((k % 2 == 0) ? 1.0 : -1.0) / std::pow(a, k + 1);
  return x.compose(t);
}

Jet sin(const Jet& x) {
  const int d = degree_of(x);
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> t(d + 1);
  for (int k = 0; k <= d; ++k) t[k] = cycle[k % 4] / factorial(k);
  return x.compose(t);
}

Jet cos(const Jet& x) {
  const int d = degree_of(x);
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> t(d + 1);
  for (int k = 0; k <= d; ++k) t[k] = cycle[k % 4] / factorial(k);
  return x.compose(t);
}

bool isfinite(const Jet& x) {
  if (!std::isfinite(x.value())) return false;
  if (x.is_constant()) return true;
  std::vector<int> e(static_cast<std::size_t>(x.layout()->nvars()));
  for (std::size_t i = 0; i < x.layout()->size(); ++i) {
    if (!std::isfinite(x.coefficient(x.layout()->exponents(i)))) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const Jet& x) {
  os << "Jet(" << x.value();
  if (!x.is_constant()) os << " + O(" << x.layout()->nvars() << " vars, deg " << x.layout()->degree() << ")";
  return os << ")";
}

}  // namespace infogeo
