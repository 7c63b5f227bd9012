#include "infogeo/contrast.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace infogeo {

ContrastFunction make_contrast(GroupoidFamily family, ArrowFunction f, int degree, bool nonneg, std::string name) {
  if (degree < 1) throw DomainError("contrast degree must be at least 1");
  return {std::make_shared<const GroupoidFamily>(std::move(family)), std::move(f), degree, nonneg, std::move(name)};
}

ContrastFunction pullback_inverse(const ContrastFunction& f) {
  ContrastFunction out = f;
  out.evaluator = ArrowFunction([fam = f.family, ev = f.evaluator](const auto& a) { return ev(inverse(*fam, a)); });
  out.name = f.name.empty() ? std::string() : f.name + "*";
  return out;
}

ArrowFunction combine(const ContrastFunction& f, double a, double b) {
  return ArrowFunction([fam = f.family, ev = f.evaluator, a, b](const auto& g) {
    using T = arrow_scalar_t<std::decay_t<decltype(g)>>;
    T out = T(a) * ev(g);
    if (b != 0.0) out += T(b) * ev(inverse(*fam, g));
    return out;
  });
}

std::vector<Section> standard_basis(const GroupoidFamily& family) {
  const int r = algebroid_rank(family);
  std::vector<Section> out;
  for (int i = 0; i < r; ++i) out.push_back(constant_section(VectorXd::Unit(r, i)));
  return out;
}

double probe_derivative(const ContrastFunction& f, const ArrowFunction& fn, const VectorXd& x,
                        std::vector<Section> lefts, std::vector<Section> rights, DiffMethod method) {
  const ProbeFactory probe(f.family, x, std::move(lefts), std::move(rights));
  return probe.derivative(fn, method);
}

Tensor probe_tensor(const ContrastFunction& f, const ArrowFunction& fn, const VectorXd& x,
                    const std::vector<Section>& basis, int lefts, int rights, DiffMethod method) {
  const int r = static_cast<int>(basis.size());
  Tensor out(lefts + rights, r);
  std::vector<Section> ls(static_cast<std::size_t>(lefts));
  std::vector<Section> rs(static_cast<std::size_t>(rights));
  // Index slots are (lefts..., rights...); each entry is an independent probe.
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::size_t rem = n;
    std::vector<int> idx(static_cast<std::size_t>(lefts + rights));
    for (int s = lefts + rights - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % static_cast<std::size_t>(r));
      rem /= static_cast<std::size_t>(r);
    }
    for (int s = 0; s < lefts; ++s) ls[s] = basis[idx[s]];
    for (int s = 0; s < rights; ++s) rs[s] = basis[idx[lefts + s]];
    out.data()[n] = probe_derivative(f, fn, x, ls, rs, method);
  }
  return out;
}

Tensor metric_gF(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis, DiffMethod method) {
  return probe_tensor(f, f.evaluator, x, basis, 2, 0, method);
}

MetricVariants metric_variants(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis,
                               DiffMethod method) {
  return {probe_tensor(f, f.evaluator, x, basis, 2, 0, method), probe_tensor(f, f.evaluator, x, basis, 1, 1, method),
          probe_tensor(f, f.evaluator, x, basis, 0, 2, method)};
}

MetricField metric_field(const ContrastFunction& f, const std::vector<Section>& basis, DiffMethod method) {
  return [f, basis, method](const VectorXd& y) { return metric_gF(f, y, basis, method).as_matrix(); };
}

Tensor skewness_TF(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis,
                   DiffMethod method) {
  return probe_tensor(f, combine(f, 1.0, -1.0), x, basis, 3, 0, method);
}

double extension_independence_residual(const ContrastFunction& f, const VectorXd& x, std::uint32_t seed,
                                       int trials, DiffMethod method) {
  const auto* pair = std::get_if<PairGroupoid>(f.family.get());
  if (!pair) throw DomainError("extension independence is checked on pair groupoids");
  const int r = pair->rank();
  const MatrixXd g = metric_gF(f, x, standard_basis(*f.family), method).as_matrix();
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    MatrixXd w(r, r);
    for (auto& c : w.reshaped()) c = normal(rng);
    for (int a = 0; a < r; ++a) {
      for (int b = a; b < r; ++b) {
        // Both slots move by the diagonal part; the source also moves along e_a, e_b.
        ProbeFunction pf{2, Lifted<Vec, Scalar>([&](const auto& s) {
                           using T = typename std::decay_t<decltype(s)>::Scalar;
                           const Vec<T> p = x.template cast<T>();
                           const Vec<T> diag = w.col(a).template cast<T>() * s[0] + w.col(b).template cast<T>() * s[1];
                           Vec<T> normal_part = Vec<T>::Zero(r);
                           normal_part[a] += s[0];
                           normal_part[b] += s[1];
                           const Arrow<T> arrow = PairArrow<T>{pair->translate(p, diag, T(1.0)),
                                                               pair->translate(p, Vec<T>(diag + normal_part), T(1.0))};
                           return f.evaluator(arrow);
                         })};
        const double d = mixed_partial(pf, DerivSpec{{1, 1}, method, std::nullopt});
        worst = std::max(worst, std::abs(d - g(a, b)));
      }
    }
  }
  return worst;
}

DualPair connection_F(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis,
                      DiffMethod method) {
  const MatrixXd g = metric_gF(f, x, basis, method).as_matrix();
  require_metric(g);
  const ContrastFunction fs = pullback_inverse(f);
  const Tensor low = probe_tensor(f, f.evaluator, x, basis, 2, 1, method);
  const Tensor low_star = probe_tensor(fs, fs.evaluator, x, basis, 2, 1, method);
  return {ConnectionCoeffs::raise(low, g), ConnectionCoeffs::raise(low_star, g)};
}

ConnectionCoeffs alpha_connection(const ConnectionCoeffs& levi_civita, const MatrixXd& g, const Tensor& t,
                                  double alpha) {
  Tensor low = levi_civita.lowered(g);
  low -= (0.5 * alpha) * t;
  return ConnectionCoeffs::raise(low, g);
}

ConnectionCoeffs alpha_connection(const Frame& frame, const MetricField& g, const Tensor& t, double alpha,
                                  const VectorXd& x) {
  return alpha_connection(koszul_levi_civita(frame, g, x), g(x), t, alpha);
}

namespace {

void check_k(int k) {
  if (k != 1 && k != 2) throw DomainError("higher tensors are available for k in {1, 2}, got " + std::to_string(k));
}

double sign_power(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

HigherTensors higher_tensors(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis, int k,
                             DiffMethod method) {
  check_k(k);
  return {probe_tensor(f, f.evaluator, x, basis, k + 1, 0, method),
          probe_tensor(f, combine(f, 1.0, sign_power(k)), x, basis, k + 2, 0, method)};
}

Tensor higher_H(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis, int k,
                DiffMethod method) {
  check_k(k);
  return probe_tensor(f, f.evaluator, x, basis, k + 1, 1, method);
}

Tensor higher_Hg(const ContrastFunction& f, const VectorXd& x, const std::vector<Section>& basis, int k,
                 DiffMethod method) {
  check_k(k);
  return probe_tensor(f, combine(f, 0.5, -0.5 * sign_power(k)), x, basis, k + 1, 1, method);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

// Nondecreasing index tuples of length m over [0, r).
std::vector<std::vector<int>> sorted_tuples(int r, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(static_cast<std::size_t>(m), 0);
  while (true) {
    out.push_back(t);
    int pos = m - 1;
    while (pos >= 0 && t[pos] == r - 1) --pos;
    if (pos < 0) break;
    ++t[pos];
    for (int q = pos + 1; q < m; ++q) t[q] = t[pos];
  }
  return out;
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << ": |F o unit| = " << unit_value;
  for (std::size_t m = 0; m < jet_norms.size(); ++m) os << ", order-" << m + 1 << " jet = " << jet_norms[m];
  if (nonneg_checked) os << ", min F off units = " << min_value;
  return os.str();
}

ValidationReport validate_contrast(const ContrastFunction& f, const std::vector<BasePoint>& samples,
                                   std::uint32_t seed, double tol) {
  const GroupoidFamily& fam = *f.family;
  const int r = algebroid_rank(fam);
  const auto basis = standard_basis(fam);
  ValidationReport rep;
  rep.jet_norms.assign(static_cast<std::size_t>(f.degree), 0.0);
  rep.nonneg_checked = f.nonneg;
  rep.min_value = std::numeric_limits<double>::infinity();
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> step(-0.05, 0.05);

  for (const auto& bp : samples) {
    check_point(fam, bp);
    const VectorXd& x = bp.coords;
    rep.unit_value = std::max(rep.unit_value, std::abs(f.evaluator(unit_embed(fam, Vec<double>(x)))));
    for (int m = 1; m <= f.degree; ++m) {
      for (const auto& tuple : sorted_tuples(r, m)) {
        std::vector<Section> lefts;
        for (int i : tuple) lefts.push_back(basis[i]);
        const double d = probe_derivative(f, f.evaluator, x, lefts, {});
        rep.jet_norms[m - 1] = std::max(rep.jet_norms[m - 1], std::abs(d));
      }
    }
    if (f.nonneg) {
      // Short random two-sided probes off the unit; points leaving the domain are skipped.
      for (int trial = 0; trial < 16; ++trial) {
        VectorXd v(r), w(r);
        for (auto& c : v) c = normal(rng);
        for (auto& c : w) c = normal(rng);
        const ProbeFactory probe(f.family, x, {constant_section(v)}, {constant_section(w)});
        const VectorXd s = (VectorXd(2) << step(rng), step(rng)).finished();
        double value = std::numeric_limits<double>::quiet_NaN();
        try {
          value = f.evaluator(probe.arrow(s));
        } catch (const std::exception&) {
        }
        if (std::isfinite(value)) rep.min_value = std::min(rep.min_value, value);
      }
    }
    ++rep.samples;
  }
  rep.pass = rep.unit_value < tol;
  for (double n : rep.jet_norms) rep.pass = rep.pass && n < tol;
  if (f.nonneg && rep.min_value < -1e-12) rep.pass = false;
  if (!f.nonneg) rep.min_value = 0.0;
  return rep;
}

}  // namespace infogeo
