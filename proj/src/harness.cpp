#include "infogeo/harness.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace infogeo {

namespace {

// ---------------------------------------------------------------------------
// Contrasts owned by the registry

ArrowFunction trace_contrast(double scale) {
  return ArrowFunction([scale](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    const Mat<T>& m = std::get<MatrixArrow<T>>(a).value;
    const Mat<T> d = Mat<T>::Identity(m.rows(), m.cols()) - m;
    return T(scale) * frobenius(d, d);
  });
}

// Prescribed fields for pair:d. g is diagonally dominant, T depends on x_0.
TensorFields pair_fields(int d) {
  TensorFields f;
  f.dim = d;
  f.g = Lifted<Vec, Mat>([d](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    using std::sin;
    Mat<T> g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        g(i, j) = i == j ? T(1.0) + 0.25 * x[i] * x[i] : T(0.1) * sin(x[i] + x[j]);
    return g;
  });
  f.t = Lifted<Vec, Vec>([d](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    Vec<T> t(d * d * d);
    const T scale = T(0.6) * (T(1.0) + 0.2 * x[0]);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) t[(i * d + j) * d + k] = scale / double(1 + i + j + k);
    return t;
  });
  return f;
}

int parse_parameter(const std::string& name, const std::string& text, int lo, int hi) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < lo || v > hi)
    throw DomainError("scenario '" + name + "' needs an integer parameter in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return v;
}

void require_size(const VectorXd& x, Eigen::Index n, const std::string& scenario) {
  if (x.size() != n)
    throw DomainError(scenario + " expects a point with " + std::to_string(n) + " coordinates, got " +
                      std::to_string(x.size()));
  if (!x.allFinite()) throw DomainError(scenario + ": point has non-finite coordinates");
}

VectorXd normal_vector(std::mt19937& rng, int n) {
  std::normal_distribution<double> normal;
  VectorXd v(n);
  for (auto& c : v) c = normal(rng);
  return v;
}

Scenario matrix_scenario(const std::string& name, GroupKind kind, int n) {
  const MatrixGroup group(kind, n);
  Scenario s;
  s.name = name;
  s.contrast = make_contrast(group, trace_contrast(group.is_complex() ? 0.5 : 1.0), 1, true, name);
  s.frame = standard_frame(*s.contrast.family);
  s.chart = s.frame->chart_id;
  s.labels = s.frame->labels;
  s.reference_point = VectorXd(0);
  s.check_point = [name](const VectorXd& x) { require_size(x, 0, name); };
  s.sample = [](std::mt19937&) { return VectorXd(0); };
  return s;
}

Scenario pair_like(const std::string& name, ContrastFunction f, VectorXd reference,
                   std::function<bool(const VectorXd&)> in_domain, std::string domain,
                   std::function<VectorXd(std::mt19937&)> sample) {
  Scenario s;
  s.name = name;
  s.contrast = std::move(f);
  s.frame = standard_frame(*s.contrast.family);
  s.chart = s.frame->chart_id;
  s.labels = s.frame->labels;
  s.reference_point = std::move(reference);
  const auto dim = s.reference_point.size();
  s.check_point = [name, dim, in_domain, domain](const VectorXd& x) {
    require_size(x, dim, name);
    if (in_domain && !in_domain(x)) throw DomainError(name + ": point outside the domain " + domain);
  };
  s.sample = std::move(sample);
  s.pair_groupoid = true;
  return s;
}

Scenario kl_scenario(const std::string& name, const std::string& model_name) {
  const ParametricModel model = find_model(model_name);
  VectorXd ref = model.dim == 1 ? VectorXd::Constant(1, 0.3) : (VectorXd(2) << 0.2, 0.3).finished();
  auto sample = [model](std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (;;) {
      VectorXd x(model.dim);
      for (auto& c : x) c = u(rng);
      if (model.in_domain(x) && (model.dim == 1 || x.sum() < 0.9)) return x;
    }
  };
  return pair_like(name, kl_contrast(model), ref, model.in_domain, model.domain, sample);
}

Scenario bregman_scenario(const std::string& name, const std::string& potential_name) {
  const Potential p = find_potential(potential_name);
  VectorXd ref;
  std::function<VectorXd(std::mt19937&)> sample;
  if (potential_name == "quartic1d") {
    ref = VectorXd::Constant(1, 1.0);
    sample = [](std::mt19937& rng) { return VectorXd::Constant(1, std::uniform_real_distribution<>(0.5, 2.0)(rng)); };
  } else if (potential_name == "quadquartic2d") {
    ref = (VectorXd(2) << 0.3, -0.2).finished();
    sample = [](std::mt19937& rng) { return VectorXd(0.5 * normal_vector(rng, 2)); };
  } else {
    ref = (VectorXd(2) << 0.5, -1.0).finished();
    sample = [](std::mt19937& rng) {
      return (VectorXd(2) << std::uniform_real_distribution<>(-1.0, 1.0)(rng),
              std::uniform_real_distribution<>(-2.0, -0.5)(rng))
          .finished();
    };
  }
  return pair_like(name, bregman_contrast(p), ref, p.in_domain, p.domain, sample);
}

Scenario sphere_entry(const std::string& name, int n) {
  ReducedScenario r = sphere_scenario(n);
  Scenario s;
  s.name = name;
  s.contrast = r.contrast;
  s.frame = r.quotient_frame;
  s.chart = r.quotient_chart;
  s.labels = r.labels;
  s.reference_point = r.reference_point;
  s.check_point = [name, n](const VectorXd& x) {
    require_size(x, n + 1, name);
    if (std::abs(x.norm() - 1.0) > 1e-9) throw DomainError(name + ": point is not on the unit sphere");
  };
  s.sample = [n](std::mt19937& rng) { return VectorXd(normal_vector(rng, n + 1).normalized()); };
  s.reduced = std::move(r);
  return s;
}

// Fubini-Study is reported on the total pair groupoid, where g^F has the
// complex line through the point as its kernel.
Scenario fubini_study_entry(const std::string& name, int n) {
  const ReducedScenario r = fubini_study_scenario(n);
  Scenario s;
  s.name = name;
  s.contrast = r.contrast;
  s.frame = standard_frame(*s.contrast.family);
  s.chart = s.frame->chart_id;
  s.labels = s.frame->labels;
  s.reference_point = r.reference_point;
  s.check_point = [name, n](const VectorXd& x) {
    require_size(x, 2 * n, name);
    if (x.norm() < 1e-12) throw DomainError(name + ": the zero vector has no projective class");
  };
  s.sample = [n](std::mt19937& rng) { return VectorXd(normal_vector(rng, 2 * n).normalized()); };
  s.pair_groupoid = true;
  return s;
}

// ---------------------------------------------------------------------------
// Evaluation shared by runs and suites

struct Evaluation {
  Tensor g, t;
  MetricInfo info;
  Frame frame;
  MetricField gfield;
  std::optional<DualPair> dual;
  std::optional<ConnectionCoeffs> lc;
};

Evaluation evaluate(const Scenario& s, const VectorXd& x, DiffMethod method) {
  s.check_point(x);
  Evaluation e;
  if (s.reduced) {
    ReducedTensors red = reduce_tensors(*s.reduced, x, method);
    e.g = std::move(red.g);
    e.t = std::move(red.t);
    e.info = red.info;
    e.dual = std::move(red.connections);
    e.gfield = reduced_metric_field(*s.reduced, method);
  } else {
    const auto basis = standard_basis(*s.contrast.family);
    e.g = metric_gF(s.contrast, x, basis, method);
    e.t = skewness_TF(s.contrast, x, basis, method);
    e.info = metric_info(e.g.as_matrix());
    if (e.info.rank == e.g.dim()) e.dual = connection_F(s.contrast, x, basis, method);
    e.gfield = metric_field(s.contrast, basis, method);
  }
  e.frame = *s.frame;
  if (e.dual) e.lc = koszul_levi_civita(e.frame, e.gfield, x);
  return e;
}

Section random_linear_section(std::mt19937& rng, int rank, int dim) {
  const MatrixXd a = normal_vector(rng, rank * dim).reshaped(rank, dim);
  const VectorXd b = normal_vector(rng, rank);
  return Section([a, b](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    return Vec<T>(a.template cast<T>() * y + b.template cast<T>());
  });
}

// Basis triples plus `triples` random linear section triples.
double duality_with_samples(const Frame& frame, const MetricField& g, const ConnectionCoeffs& a,
                            const ConnectionCoeffs& b, const VectorXd& x, std::mt19937& rng, int triples) {
  double worst = duality_residual(frame, g, a, b, x);
  for (int k = 0; k < triples; ++k) {
    const Section X = random_linear_section(rng, frame.rank, frame.dim);
    const Section Y = random_linear_section(rng, frame.rank, frame.dim);
    const Section Z = random_linear_section(rng, frame.rank, frame.dim);
    worst = std::max(worst, dual_connection_check(frame, g, a, b, x, X, Y, Z));
  }
  return worst;
}

double max_gap(const ConnectionCoeffs& a, const ConnectionCoeffs& b) { return max_difference(a.upper, b.upper); }

ConnectionCoeffs midpoint(const DualPair& d) {
  ConnectionCoeffs m{0.5 * (d.nabla.upper + d.nabla_star.upper)};
  return m;
}

nlohmann::ordered_json nest(const Tensor& t) {
  if (t.order() == 0) return t.data()[0];
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  const std::size_t stride = t.size() / static_cast<std::size_t>(t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    Tensor slice(t.order() - 1, t.dim());
    std::copy_n(t.data().begin() + static_cast<std::ptrdiff_t>(i * stride), stride, slice.data().begin());
    out.push_back(nest(slice));
  }
  return out;
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json optional_gamma(const std::optional<ConnectionCoeffs>& c) {
  return c ? nest(c->upper) : nlohmann::ordered_json(nullptr);
}

std::string number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string index_label(std::span<const int> idx) {
  std::string s;
  for (int i : idx) s += std::to_string(i + 1);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Registry

std::vector<std::string> scenario_patterns() {
  return {"gl:n",          "un:n",          "son:n",
          "su:n",          "pair:d",        "kl:binary",
          "kl:categorical3", "bregman:quartic1d", "bregman:quadquartic2d",
          "bregman:gaussian-natural", "sphere:n", "sphere-bundle:n",
          "fubini-study:n"};
}

std::vector<std::string> registered_scenarios() {
  return {"gl:2",           "un:2",          "son:3",           "su:2",
          "pair:2",         "pair:3",        "kl:binary",       "kl:categorical3",
          "bregman:quartic1d", "bregman:quadquartic2d", "bregman:gaussian-natural",
          "sphere:2",       "sphere:3",      "fubini-study:2",  "fubini-study:3"};
}

Scenario make_scenario(const std::string& name) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  if (head == "gl") return matrix_scenario(name, GroupKind::GL, parse_parameter(name, arg, 1, 4));
  if (head == "un") return matrix_scenario(name, GroupKind::U, parse_parameter(name, arg, 1, 3));
  if (head == "son") return matrix_scenario(name, GroupKind::SO, parse_parameter(name, arg, 2, 4));
  if (head == "su") return matrix_scenario(name, GroupKind::SU, parse_parameter(name, arg, 2, 3));
  if (head == "pair") {
    const int d = parse_parameter(name, arg, 1, 5);
    auto f = build_contrast_from_tensors(pair_fields(d), {VectorXd::Zero(d)});
    f.name = name;
    return pair_like(name, f, VectorXd::Constant(d, 0.2), nullptr, "R^" + arg,
                     [d](std::mt19937& rng) { return VectorXd(0.7 * normal_vector(rng, d)); });
  }
  if (head == "kl" && (arg == "binary" || arg == "categorical3")) return kl_scenario(name, arg);
  if (head == "bregman" && (arg == "quartic1d" || arg == "quadquartic2d" || arg == "gaussian-natural"))
    return bregman_scenario(name, arg);
  if (head == "sphere" || head == "sphere-bundle") return sphere_entry(name, parse_parameter(name, arg, 2, 4));
  if (head == "fubini-study") return fubini_study_entry(name, parse_parameter(name, arg, 2, 4));
  throw DomainError("unknown scenario '" + name + "'");
}

VectorXd parse_point(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const char* first = text.data() + pos;
    while (first < text.data() + end && *first == ' ') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, text.data() + end, v);
    if (ec != std::errc() || ptr != text.data() + end) throw DomainError("cannot parse point '" + text + "'");
    values.push_back(v);
    pos = end + 1;
    if (end + 1 == text.size()) throw DomainError("cannot parse point '" + text + "'");
  }
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// ---------------------------------------------------------------------------
// Runs

RunResult run_scenario(const Scenario& s, const VectorXd& point, const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.scenario = s.name;
  r.chart = s.chart;
  r.point = point;
  r.frame = s.labels;
  r.alpha = config.alphas;
  r.seed = config.seed;
  r.method = to_string(config.method);

  Evaluation e = evaluate(s, point, config.method);
  r.g = e.g;
  r.t = e.t;
  r.diagnostics.g_symmetry = e.g.symmetry_residual();
  r.diagnostics.t_symmetry = e.t.symmetry_residual();
  r.diagnostics.g_rank = e.info.rank;
  r.diagnostics.g_cond = e.info.cond;

  if (!e.dual) {
    r.degenerate = true;
    spdlog::warn("{}: metric has rank {} of {}; connections omitted", s.name, e.info.rank, e.g.dim());
  } else {
    const MatrixXd g = e.g.as_matrix();
    r.gamma_F = e.dual->nabla;
    r.gamma_Fstar = e.dual->nabla_star;
    r.gamma_LC = e.lc;
    for (double a : config.alphas) r.alpha_connections.push_back(alpha_connection(*e.lc, g, e.t, a));
    std::mt19937 rng(config.seed);
    r.diagnostics.duality = duality_with_samples(e.frame, e.gfield, e.dual->nabla, e.dual->nabla_star, point, rng, 4);
    r.diagnostics.torsion_F = torsion(e.frame, e.dual->nabla, point).max_abs();
    r.diagnostics.torsion_Fstar = torsion(e.frame, e.dual->nabla_star, point).max_abs();
    r.diagnostics.metricity_LC = metricity_residual(e.frame, e.gfield, *e.lc, point);
  }
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  spdlog::debug("{} at {} coordinates took {:.1f} ms", s.name, point.size(), ms);
  return r;
}

RunResult run_scenario(const RunConfig& config) {
  const Scenario s = make_scenario(config.scenario);
  const VectorXd x = config.points.empty() ? s.reference_point : config.points.front();
  return run_scenario(s, x, config);
}

nlohmann::ordered_json to_json(const RunResult& r) {
  using json = nlohmann::ordered_json;
  json alpha_conn = json::array();
  for (std::size_t k = 0; k < r.alpha_connections.size(); ++k)
    alpha_conn.push_back({{"alpha", r.alpha[k]}, {"gamma", nest(r.alpha_connections[k].upper)}});
  const auto& d = r.diagnostics;
  return json{
      {"scenario", r.scenario},
      {"chart", r.chart},
      {"point", std::vector<double>(r.point.begin(), r.point.end())},
      {"frame", r.frame},
      {"alpha", r.alpha},
      {"g", nest(r.g)},
      {"T", nest(r.t)},
      {"gamma_F", optional_gamma(r.gamma_F)},
      {"gamma_Fstar", optional_gamma(r.gamma_Fstar)},
      {"gamma_LC", optional_gamma(r.gamma_LC)},
      {"alpha_connections", alpha_conn},
      {"diagnostics",
       {{"g_symmetry", d.g_symmetry},
        {"T_symmetry", d.t_symmetry},
        {"duality", optional_number(d.duality)},
        {"torsion_F", optional_number(d.torsion_F)},
        {"torsion_Fstar", optional_number(d.torsion_Fstar)},
        {"metricity_LC", optional_number(d.metricity_LC)},
        {"g_rank", d.g_rank},
        {"g_cond", d.g_cond}}},
      {"seed", r.seed},
      {"method", r.method},
      {"version", kVersion},
  };
}

// ---------------------------------------------------------------------------
// Verification suites

namespace {

class Recorder {
 public:
  Recorder(std::vector<CheckResult>& out, std::string suite, std::optional<double> tol)
      : out_(out), suite_(std::move(suite)), tol_(tol) {}

  void add(const std::string& name, double residual, double tol) {
    const double t = tol_.value_or(tol);
    out_.push_back({suite_, name, residual, t, std::isfinite(residual) && residual < t});
    if (!out_.back().pass) spdlog::info("FAIL {}/{}: {:.3e} >= {:.1e}", suite_, name, residual, t);
  }

 private:
  std::vector<CheckResult>& out_;
  std::string suite_;
  std::optional<double> tol_;
};

std::vector<std::pair<std::string, GroupoidFamily>> axiom_families() {
  MatrixXd w(1, 2);
  w << 0.7, -0.4;
  const MatrixGroup so2(GroupKind::SO, 2), so3(GroupKind::SO, 3);
  return {
      {"GL(2)", MatrixGroup(GroupKind::GL, 2)},
      {"U(2)", MatrixGroup(GroupKind::U, 2)},
      {"SO(3)", so3},
      {"SU(2)", MatrixGroup(GroupKind::SU, 2)},
      {"pair R^3", PairGroupoid::euclidean(3)},
      {"pair SO(3)", PairGroupoid::over_group(so3)},
      {"R^2 x SO(2)", TrivializedG{PairGroupoid::euclidean(2), so2, coboundary_morphism(so2, w)}},
      {"SO(3) x SO(3)", TrivializedG{so3, so3, identity_morphism()}},
  };
}

double coordinate_scale(const Arrow<double>& a) { return 1.0 + arrow_coordinates(a).cwiseAbs().maxCoeff(); }

double vec_gap(const VectorXd& a, const VectorXd& b) { return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0; }

// f(x) = sin(x.w) + (x.w)^2 / 2 pulled back along target or source.
ArrowFunction pulled_back(std::shared_ptr<const GroupoidFamily> fam, const VectorXd& w, bool along_target) {
  return ArrowFunction([fam, w, along_target](const auto& a) {
    using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
    using std::sin;
    const Vec<T> x = along_target ? target(*fam, a) : source(*fam, a);
    T dot(0.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) dot += x[i] * w[i];
    return sin(dot) + 0.5 * dot * dot;
  });
}

void axioms_suite(Recorder& rec, const VerifyOptions& o) {
  for (const auto& [name, family] : axiom_families()) {
    auto fam = std::make_shared<const GroupoidFamily>(family);
    std::mt19937 rng(o.seed);
    double assoc = 0.0, st = 0.0, unit = 0.0, inv = 0.0;
    for (int trial = 0; trial < o.samples; ++trial) {
      const Arrow<double> c = sample_arrow(family, rng);
      const Arrow<double> b = sample_arrow_from(family, target(family, c), rng);
      const Arrow<double> a = sample_arrow_from(family, target(family, b), rng);
      const double sc = coordinate_scale(a) * coordinate_scale(b) * coordinate_scale(c);
      assoc = std::max(assoc, arrow_distance(compose(family, compose(family, a, b), c),
                                             compose(family, a, compose(family, b, c))) / sc);
      const Arrow<double> ab = compose(family, a, b);
      st = std::max({st, vec_gap(target(family, ab), target(family, a)) / sc,
                     vec_gap(source(family, ab), source(family, b)) / sc});
      const Arrow<double> ta = unit_embed(family, Vec<double>(target(family, a)));
      const Arrow<double> sa = unit_embed(family, Vec<double>(source(family, a)));
      unit = std::max({unit, arrow_distance(compose(family, ta, a), a) / sc,
                       arrow_distance(compose(family, a, sa), a) / sc, arrow_distance(compose(family, ta, ta), ta)});
      inv = std::max({inv, arrow_distance(compose(family, a, inverse(family, a)), ta) / sc,
                      arrow_distance(compose(family, inverse(family, a), a), sa) / sc});
    }
    rec.add(name + " associativity", assoc, 1e-10);
    rec.add(name + " source/target of composite", st, 1e-10);
    rec.add(name + " unit laws", unit, 1e-10);
    rec.add(name + " inverse laws", inv, 1e-10);

    // Probe conventions.
    const int d = base_dimension(family);
    const int r = algebroid_rank(family);
    const VectorXd w = normal_vector(rng, std::max(d, 1)).head(d);
    const auto f_t = pulled_back(fam, w, true);
    const auto f_s = pulled_back(fam, w, false);
    VectorXd wc(arrow_coordinates(sample_arrow(family, rng)).size());
    for (auto& c : wc) c = std::normal_distribution<>()(rng);
    const ArrowFunction generic([wc](const auto& a) {
      using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
      using std::sin;
      const Vec<T> c = arrow_coordinates(a);
      T acc(0.0);
      for (Eigen::Index i = 0; i < c.size(); ++i) acc += wc[i] * c[i];
      return sin(acc) * acc;
    });
    double anchor = 0.0, annihilate = 0.0, commute = 0.0;
    for (int trial = 0; trial < o.samples; ++trial) {
      const VectorXd x = sample_point(family, rng);
      const VectorXd v = normal_vector(rng, r), vz = normal_vector(rng, r);
      const VectorXd tangent = anchor_matrix(family, x) * v;
      double expected = 0.0;
      if (d) {
        const double dot = x.dot(w);
        expected = (std::cos(dot) + dot) * w.dot(tangent);
      }
      const ProbeFactory L(fam, x, {constant_section(v)}, {});
      const ProbeFactory R(fam, x, {}, {constant_section(v)});
      const double lt = L.derivative(f_t, o.method), rt = R.derivative(f_t, o.method);
      const double ls = L.derivative(f_s, o.method), rs = R.derivative(f_s, o.method);
      anchor = std::max({anchor, std::abs(lt - rt - expected), std::abs(ls - expected)});
      annihilate = std::max({annihilate, std::abs(rs), std::abs(lt)});
      const ProbeFactory lr(fam, x, {constant_section(v)}, {constant_section(vz)}, false);
      const ProbeFactory rl(fam, x, {constant_section(v)}, {constant_section(vz)}, true);
      commute = std::max(commute, std::abs(lr.derivative(generic, o.method) - rl.derivative(generic, o.method)));
    }
    rec.add(name + " anchor relation (X^L - X^R ~ alpha(X))", anchor, 1e-6);
    rec.add(name + " X^R(f o s) = X^L(f o t) = 0", annihilate, 1e-7);
    rec.add(name + " [X^R, Y^L] = 0", commute, 1e-7);

    if (const auto* t = std::get_if<TrivializedG>(&family)) {
      const GroupoidFamily base = std::visit([](const auto& b) -> GroupoidFamily { return b; }, t->base);
      auto as_base = [](const Arrow<double>& a) -> BaseArrow<double> {
        if (auto* m = std::get_if<MatrixArrow<double>>(&a)) return *m;
        return std::get<PairArrow<double>>(a);
      };
      double morph = 0.0;
      for (int trial = 0; trial < o.samples; ++trial) {
        const Arrow<double> h = sample_arrow(base, rng);
        const Arrow<double> g = sample_arrow_from(base, target(base, h), rng);
        const MatrixXd lhs = t->b(as_base(compose(base, g, h)));
        morph = std::max(morph, (lhs - t->b(as_base(g)) * t->b(as_base(h))).cwiseAbs().maxCoeff());
      }
      rec.add(name + " b is multiplicative", morph, 1e-9);
    }
  }
}

std::vector<VectorXd> suite_points(const Scenario& s, std::uint32_t seed, int extra) {
  std::vector<VectorXd> pts{s.reference_point};
  if (s.reference_point.size() == 0) return pts;
  std::mt19937 rng(seed);
  for (int k = 0; k < extra; ++k) pts.push_back(s.sample(rng));
  return pts;
}

std::string at(const Scenario& s, const VectorXd& x) {
  std::ostringstream os;
  os << s.name;
  if (x.size()) {
    os << " at (";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << number(std::round(x[i] * 1e4) / 1e4);
    os << ")";
  }
  return os.str();
}

void lemma1_suite(Recorder& rec, const VerifyOptions& o) {
  for (const auto& name : registered_scenarios()) {
    const Scenario s = make_scenario(name);
    if (!s.pair_groupoid) continue;
    const auto basis = standard_basis(*s.contrast.family);
    const ContrastFunction star = pullback_inverse(s.contrast);
    for (const auto& x : suite_points(s, o.seed, 2)) {
      const std::string where = at(s, x);
      rec.add(where + " extension independence", extension_independence_residual(s.contrast, x, o.seed, 4, o.method),
              1e-6);
      const auto v = metric_variants(s.contrast, x, basis, o.method);
      rec.add(where + " g permutation symmetry",
              std::max({v.ll.symmetry_residual(), max_difference(v.ll, v.lr), max_difference(v.ll, v.rr)}), 1e-6);
      rec.add(where + " T permutation symmetry", skewness_TF(s.contrast, x, basis, o.method).symmetry_residual(),
              1e-6);
      rec.add(where + " g(F*) = g(F)", max_difference(metric_gF(star, x, basis, o.method), v.ll), 1e-7);
    }
  }
}

// Scenarios with a nondegenerate g, evaluated once per point for the connection suites.
struct Evaluated {
  std::string where;
  VectorXd x;
  Evaluation e;
};

std::vector<Evaluated> connection_cases(const VerifyOptions& o) {
  std::vector<Evaluated> out;
  for (const auto& name : registered_scenarios()) {
    const Scenario s = make_scenario(name);
    for (const auto& x : suite_points(s, o.seed, 1)) {
      Evaluation e = evaluate(s, x, o.method);
      if (!e.dual) continue;
      out.push_back({at(s, x), x, std::move(e)});
    }
  }
  return out;
}

void duality_suite(Recorder& rec, const VerifyOptions& o, const std::vector<Evaluated>& cases) {
  std::mt19937 rng(o.seed);
  for (const auto& [where, x, e] : cases) {
    ConnectionCoeffs star = e.dual->nabla_star;
    if (o.perturb_dual) star.upper(0, 0, 0) += 0.05;
    rec.add(where + " (nabla^F, nabla^F*) duality",
            duality_with_samples(e.frame, e.gfield, e.dual->nabla, star, x, rng, 4), 1e-6);
    const MatrixXd g = e.g.as_matrix();
    double worst = 0.0;
    for (double a : o.alphas) {
      const auto plus = alpha_connection(*e.lc, g, e.t, a);
      const auto minus = alpha_connection(*e.lc, g, e.t, -a);
      worst = std::max(worst, duality_residual(e.frame, e.gfield, plus, minus, x));
    }
    rec.add(where + " (nabla^a, nabla^-a) duality", worst, 1e-6);
  }
}

void torsion_suite(Recorder& rec, const VerifyOptions& o, const std::vector<Evaluated>& cases) {
  for (const auto& [where, x, e] : cases) {
    rec.add(where + " torsion of nabla^F", torsion(e.frame, e.dual->nabla, x).max_abs(), 1e-6);
    rec.add(where + " torsion of nabla^F*", torsion(e.frame, e.dual->nabla_star, x).max_abs(), 1e-6);
    const MatrixXd g = e.g.as_matrix();
    double worst = 0.0;
    for (double a : o.alphas)
      worst = std::max(worst, torsion(e.frame, alpha_connection(*e.lc, g, e.t, a), x).max_abs());
    rec.add(where + " torsion of nabla^a", worst, 1e-6);
  }
}

void koszul_suite(Recorder& rec, const VerifyOptions&, const std::vector<Evaluated>& cases) {
  for (const auto& [where, x, e] : cases) {
    const MatrixXd g = e.g.as_matrix();
    rec.add(where + " (Gamma^F + Gamma^F*)/2 = Levi-Civita", max_gap(midpoint(*e.dual), *e.lc), 1e-6);
    rec.add(where + " alpha = -1 gives nabla^F", max_gap(alpha_connection(*e.lc, g, e.t, -1.0), e.dual->nabla), 1e-6);
    rec.add(where + " alpha = +1 gives nabla^F*",
            max_gap(alpha_connection(*e.lc, g, e.t, 1.0), e.dual->nabla_star), 1e-6);
    rec.add(where + " Levi-Civita metricity", metricity_residual(e.frame, e.gfield, *e.lc, x), 1e-6);
    rec.add(where + " Levi-Civita torsion", torsion(e.frame, *e.lc, x).max_abs(), 1e-6);
  }
}

void reduction_suite(Recorder& rec, const VerifyOptions& o) {
  for (int n : {2, 3}) {
    const ReducedScenario s = sphere_scenario(n);
    const std::string tag = s.name;
    std::mt19937 rng(o.seed);
    std::vector<Arrow<double>> arrows;
    for (int k = 0; k < 10; ++k) arrows.push_back(sample_arrow(*s.contrast.family, rng));
    rec.add(tag + " SO(n) invariance", check_invariance(s.contrast, s.action, arrows, o.seed).max_deviation, 1e-9);

    const VectorXd x0 = s.reference_point;
    const ReducedTensors red = reduce_tensors(s, x0, o.method);
    rec.add(tag + " reduced g = identity", max_difference(red.g, Tensor::from_matrix(MatrixXd::Identity(red.g.dim(), red.g.dim()))),
            1e-6);
    rec.add(tag + " reduced T = 0", red.t.max_abs(), 1e-7);
    rec.add(tag + " lift independence", lift_independence_residual(s, x0, o.seed, 3, o.method), 1e-6);

    const auto& family = *s.contrast.family;
    const auto& group = *std::get<PairGroupoid>(family).group();
    const VectorXd p = s.lift(x0, s.fiber_identity);
    const Tensor g = metric_gF(s.contrast, p, standard_basis(family), o.method);
    double worst = 0.0;
    for (int i = 0; i < g.dim(); ++i)
      for (int j = 0; j < g.dim(); ++j)
        worst = std::max(worst,
                         std::abs(g(i, j) - 0.5 * (group.basis()[i] * group.basis()[j].transpose()).trace()));
    rec.add(tag + " total g = tr(X Y^t)/2", worst, 1e-6);
  }

  for (int n : {2, 3}) {
    const ReducedScenario s = fubini_study_scenario(n);
    const std::string tag = s.name;
    const auto& family = *s.contrast.family;
    const VectorXd phi = s.reference_point;
    const Tensor g = metric_gF(s.contrast, phi, standard_basis(family), o.method);
    const VectorXd sv = metric_info(g.as_matrix()).singular_values;  // descending
    const Eigen::Index m = sv.size();
    rec.add(tag + " two null directions", sv.tail(2).maxCoeff(), 1e-8);
    rec.add(tag + " remaining singular values above 0.1 (ratio 0.1 / s_min)", 0.1 / sv.head(m - 2).minCoeff(), 1.0);
    rec.add(tag + " g(e2, e2) = 2", std::abs(g(1, 1) - 2.0), 1e-6);
    std::mt19937 rng(o.seed);
    std::vector<Arrow<double>> arrows;
    for (int k = 0; k < 10; ++k) arrows.push_back(sample_arrow(family, rng));
    rec.add(tag + " phase invariance", check_invariance(s.contrast, s.action, arrows, o.seed).max_deviation, 1e-9);
  }
}

// Pair R^1 polynomial F(t, s) = u^2 (1 + b t) + c u^3 + d u^4 with u = s - t.
ContrastFunction polynomial_contrast(double b, double c, double d) {
  return make_contrast(PairGroupoid::euclidean(1), ArrowFunction([b, c, d](const auto& a) {
                         using T = arrow_scalar_t<std::decay_t<decltype(a)>>;
                         const auto& p = std::get<PairArrow<T>>(a);
                         const T t = p.first[0];
                         const T u = p.second[0] - t;
                         return u * u * (1.0 + b * t) + c * u * u * u + d * u * u * u * u;
                       }));
}

template <class T>
T bump(const Vec<T>& y) {
  using std::sin;
  T acc(1.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) acc += 0.5 * sin(y[i]) / double(i + 1);
  return acc;
}

Section scaled(const Section& s) {
  return Section([s](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    return Vec<T>(bump(y) * s(y));
  });
}

void higher_suite(Recorder& rec, const VerifyOptions& o) {
  const double b = 0.6, c = -0.35, d = 0.8;
  const auto f = polynomial_contrast(b, c, d);
  const auto basis = standard_basis(*f.family);
  std::mt19937 rng(o.seed);
  double deg3 = 0.0, deg4 = 0.0, h = 0.0;
  for (int k = 0; k < 5; ++k) {
    const VectorXd x = VectorXd::Constant(1, std::uniform_real_distribution<>(-1.0, 1.0)(rng));
    const auto k1 = higher_tensors(f, x, basis, 1, o.method);
    const auto k2 = higher_tensors(f, x, basis, 2, o.method);
    deg3 = std::max({deg3, std::abs(k1.g.data()[0] - 2.0 * (1.0 + b * x[0])),
                     std::abs(k1.t.data()[0] - 6.0 * (2.0 * c - b)), std::abs(k2.g.data()[0] - 6.0 * c)});
    deg4 = std::max(deg4, std::abs(k2.t.data()[0] - 48.0 * d));
    h = std::max({h, std::abs(higher_H(f, x, basis, 1, o.method).data()[0] - (6.0 * c - 2.0 * b)),
                  std::abs(higher_H(f, x, basis, 2, o.method).data()[0] - 24.0 * d),
                  std::abs(higher_Hg(f, x, basis, 1, o.method).data()[0] - b),
                  std::abs(higher_Hg(f, x, basis, 2, o.method).data()[0])});
  }
  rec.add("polynomial degree 3: g_2, T_3, g_3", deg3, 1e-5);
  rec.add("polynomial degree 4: T_4", deg4, 1e-5);
  rec.add("polynomial H_3, H_4, H^g_3, H^g_4", h, 1e-5);

  // H(X1, X2; Z) is tensorial in X1 and Z and first order in X2.
  const Scenario s = make_scenario("pair:2");
  const Frame& frame = *s.frame;
  const std::function<double(const VectorXd&)> fn = [](const VectorXd& y) { return bump(Vec<double>(y)); };
  double outer = 0.0, middle = 0.0;
  for (int k = 0; k < 5; ++k) {
    const VectorXd x = s.sample(rng);
    const Section x1 = random_linear_section(rng, 2, 2), x2 = random_linear_section(rng, 2, 2),
                  z = random_linear_section(rng, 2, 2);
    const auto& F = s.contrast;
    const double base = probe_derivative(F, F.evaluator, x, {x1, x2}, {z}, o.method);
    outer = std::max({outer, std::abs(probe_derivative(F, F.evaluator, x, {scaled(x1), x2}, {z}, o.method) - fn(x) * base),
                      std::abs(probe_derivative(F, F.evaluator, x, {x1, x2}, {scaled(z)}, o.method) - fn(x) * base)});
    const double mixed = probe_derivative(F, F.evaluator, x, {x2}, {z}, o.method);
    const double mid = probe_derivative(F, F.evaluator, x, {x1, scaled(x2)}, {z}, o.method);
    middle = std::max(middle, std::abs(mid - fn(x) * base - anchor_derivative(frame, x1(x), fn, x) * mixed));
  }
  rec.add("H tensorial in the outer slots", outer, 1e-6);
  rec.add("H first order in the middle slot", middle, 1e-6);
}

}  // namespace

std::vector<std::string> verify_suites() {
  return {"axioms", "lemma1", "duality", "torsion", "koszul", "reduction", "higher", "all"};
}

std::vector<CheckResult> verify(const std::string& suite, const VerifyOptions& o) {
  const auto names = verify_suites();
  if (std::find(names.begin(), names.end(), suite) == names.end())
    throw DomainError("unknown suite '" + suite + "'");
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  auto rec = [&](const char* name) { return Recorder(out, name, o.tol); };
  if (all || suite == "axioms") {
    auto r = rec("axioms");
    axioms_suite(r, o);
  }
  if (all || suite == "lemma1") {
    auto r = rec("lemma1");
    lemma1_suite(r, o);
  }
  if (all || suite == "duality" || suite == "torsion" || suite == "koszul") {
    const auto cases = connection_cases(o);
    if (all || suite == "duality") {
      auto r = rec("duality");
      duality_suite(r, o, cases);
    }
    if (all || suite == "torsion") {
      auto r = rec("torsion");
      torsion_suite(r, o, cases);
    }
    if (all || suite == "koszul") {
      auto r = rec("koszul");
      koszul_suite(r, o, cases);
    }
  }
  if (all || suite == "reduction") {
    auto r = rec("reduction");
    reduction_suite(r, o);
  }
  if (all || suite == "higher") {
    auto r = rec("higher");
    higher_suite(r, o);
  }
  return out;
}

nlohmann::ordered_json to_json(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    out.push_back({{"suite", c.suite}, {"name", c.name}, {"residual", c.residual}, {"tol", c.tol}, {"pass", c.pass}});
  return out;
}

// ---------------------------------------------------------------------------
// Scans

std::vector<ScanRow> scan(const Scenario& s, const std::vector<VectorXd>& points, const RunConfig& config,
                          int threads) {
  std::vector<ScanRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      rows[i].point = points[i];
      try {
        rows[i].result = run_scenario(s, points[i], config);
      } catch (const std::exception& e) {
        rows[i].error = e.what();
        spdlog::warn("{}: point {} failed: {}", s.name, i, e.what());
      }
    }
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(1, points.size())));
  std::vector<std::jthread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  return rows;
}

std::vector<VectorXd> grid_points(const std::vector<std::string>& axes) {
  std::vector<std::vector<double>> values;
  for (const auto& spec : axes) {
    double start = 0.0, stop = 0.0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 || !in.eof())
      throw DomainError("grid axis '" + spec + "' is not start:stop:count");
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
    values.push_back(std::move(v));
  }
  std::vector<VectorXd> out;
  if (values.empty()) return out;
  std::vector<std::size_t> idx(values.size(), 0);
  for (;;) {
    VectorXd p(static_cast<Eigen::Index>(values.size()));
    for (std::size_t a = 0; a < values.size(); ++a) p[static_cast<Eigen::Index>(a)] = values[a][idx[a]];
    out.push_back(p);
    std::size_t a = values.size();
    while (a > 0) {
      --a;
      if (++idx[a] < values[a].size()) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
  }
}

std::string scan_csv(const Scenario& s, const std::vector<ScanRow>& rows) {
  const int dim = static_cast<int>(s.reference_point.size());
  const int rank = static_cast<int>(s.labels.size());
  std::ostringstream os;
  os << "index";
  for (int i = 0; i < dim; ++i) os << ",x" << i + 1;
  Tensor(2, rank).for_each_index([&](std::span<const int> idx) { os << ",g" << index_label(idx); });
  Tensor(3, rank).for_each_index([&](std::span<const int> idx) { os << ",T" << index_label(idx); });
  os << ",g_symmetry,T_symmetry,duality,torsion_F,torsion_Fstar,metricity_LC,g_rank,g_cond,error\n";

  auto opt = [](const std::optional<double>& v) { return v ? number(*v) : std::string(); };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    os << r;
    for (int i = 0; i < dim; ++i) os << ',' << (i < row.point.size() ? number(row.point[i]) : "");
    const std::size_t cells = static_cast<std::size_t>(rank * rank + rank * rank * rank);
    if (row.result) {
      for (double v : row.result->g.data()) os << ',' << number(v);
      for (double v : row.result->t.data()) os << ',' << number(v);
      const auto& d = row.result->diagnostics;
      os << ',' << number(d.g_symmetry) << ',' << number(d.t_symmetry) << ',' << opt(d.duality) << ','
         << opt(d.torsion_F) << ',' << opt(d.torsion_Fstar) << ',' << opt(d.metricity_LC) << ',' << d.g_rank << ','
         << number(d.g_cond) << ',';
    } else {
      os << std::string(cells + 8, ',') << ',';
    }
    std::string err = row.error;
    for (auto& ch : err)
      if (ch == '"') ch = '\'';
    if (!err.empty()) os << '"' << err << '"';
    os << '\n';
  }
  return os.str();
}

nlohmann::ordered_json scan_json(const std::vector<ScanRow>& rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    if (row.result) {
      out.push_back(to_json(*row.result));
    } else {
      out.push_back({{"point", std::vector<double>(row.point.begin(), row.point.end())}, {"error", row.error}});
    }
  }
  return out;
}

}  // namespace infogeo
