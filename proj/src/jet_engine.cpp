#include "infogeo/jet_engine.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace infogeo {

namespace {

struct Stencil1D {
  std::vector<int> offsets;
  std::vector<double> weights;
};

// Second-order accurate central stencils for derivatives of order 0..5.
const Stencil1D& central_stencil(int order) {
  static const std::array<Stencil1D, 6> table = {{
      {{0}, {1.0}},
      {{-1, 1}, {-0.5, 0.5}},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}},
      {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
      {{-3, -2, -1, 1, 2, 3}, {-0.5, 2.0, -2.5, 2.5, -2.0, 0.5}},
  }};
  return table.at(static_cast<std::size_t>(order));
}

std::string describe(std::span<const double> node) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < node.size(); ++i) os << (i ? ", " : "") << node[i];
  os << ")";
  return os.str();
}

class StencilCache {
 public:
  explicit StencilCache(const ProbeFunction& f) : f_(f) {}

  double at(const std::vector<double>& node) {
    auto it = cache_.find(node);
    if (it != cache_.end()) return it->second;
    VectorXd s = Eigen::Map<const VectorXd>(node.data(), static_cast<Eigen::Index>(node.size()));
    double v = f_.evaluator(s);
    if (!std::isfinite(v)) {
      throw NumericError("non-finite evaluation at stencil node " + describe(node));
    }
    cache_.emplace(node, v);
    return v;
  }

 private:
  const ProbeFunction& f_;
  std::map<std::vector<double>, double> cache_;
};

double central_difference(StencilCache& cache, std::span<const int> multi_index, double h) {
  const std::size_t k = multi_index.size();
  std::vector<const Stencil1D*> stencils(k);
  for (std::size_t i = 0; i < k; ++i) stencils[i] = &central_stencil(multi_index[i]);

  std::vector<std::size_t> pos(k, 0);
  std::vector<double> node(k, 0.0);
  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      w *= stencils[i]->weights[pos[i]];
      node[i] = stencils[i]->offsets[pos[i]] * h;
    }
    acc += w * cache.at(node);
    std::size_t i = 0;
    for (; i < k; ++i) {
      if (++pos[i] < stencils[i]->offsets.size()) break;
      pos[i] = 0;
    }
    if (i == k) break;
  }
  const int order = std::accumulate(multi_index.begin(), multi_index.end(), 0);
  return acc / std::pow(h, order);
}

void check_spec(const ProbeFunction& f, const DerivSpec& spec) {
  if (static_cast<int>(spec.multi_index.size()) != f.arity) {
    throw DomainError("multi_index length " + std::to_string(spec.multi_index.size()) +
                      " does not match probe arity " + std::to_string(f.arity));
  }
  for (int m : spec.multi_index) {
    if (m < 0) throw DomainError("negative multi_index entry");
  }
  if (spec.order() > kMaxDerivativeOrder) {
    throw DomainError("derivative order " + std::to_string(spec.order()) + " exceeds bound " +
                      std::to_string(kMaxDerivativeOrder));
  }
  if (spec.base_step && !(*spec.base_step > 0.0)) throw DomainError("base_step must be positive");
}

double fd_value(StencilCache& cache, const DerivSpec& spec) {
  const double h = spec.base_step.value_or(default_step(spec.order()));
  const double coarse = central_difference(cache, spec.multi_index, h);
  if (spec.method == DiffMethod::central_fd) return coarse;
  const double fine = central_difference(cache, spec.multi_index, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

const char* to_string(DiffMethod m) {
  switch (m) {
    case DiffMethod::central_fd:
      return "fd";
    case DiffMethod::central_fd_richardson:
      return "fd-richardson";
    case DiffMethod::taylor_jet:
      return "jet";
  }
  return "?";
}

DiffMethod parse_method(const std::string& name) {
  if (name == "fd") return DiffMethod::central_fd;
  if (name == "fd-richardson") return DiffMethod::central_fd_richardson;
  if (name == "jet") return DiffMethod::taylor_jet;
  throw DomainError("unknown derivative method '" + name + "'");
}

int DerivSpec::order() const { return std::accumulate(multi_index.begin(), multi_index.end(), 0); }

double default_step(int total_order) {
  switch (total_order) {
    case 0:
    case 1:
    case 2:
      return 1e-4;
    case 3:
      return 5e-3;
    case 4:
      return 2e-2;
    default:
      return 4e-2;
  }
}

double mixed_partial(const ProbeFunction& f, const DerivSpec& spec) {
  return derivative_table(f, std::span<const DerivSpec>(&spec, 1)).front();
}

std::vector<double> derivative_table(const ProbeFunction& f, std::span<const DerivSpec> specs) {
  for (const auto& s : specs) check_spec(f, s);
  std::vector<double> out(specs.size());

  int jet_degree = -1;
  for (const auto& s : specs) {
    if (s.method == DiffMethod::taylor_jet) jet_degree = std::max(jet_degree, s.order());
  }
  if (jet_degree >= 0) {
    auto layout = JetLayout::get(f.arity, std::max(jet_degree, 1));
    Vec<Jet> seeds(f.arity);
    for (int i = 0; i < f.arity; ++i) seeds[i] = Jet::variable(layout, i);
    Jet value = f.evaluator(seeds);
    if (!isfinite(value)) throw NumericError("non-finite taylor jet evaluation at the origin");
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (specs[i].method == DiffMethod::taylor_jet) out[i] = value.partial(specs[i].multi_index);
    }
  }

  StencilCache cache(f);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].method != DiffMethod::taylor_jet) out[i] = fd_value(cache, specs[i]);
  }
  return out;
}

}  // namespace infogeo
