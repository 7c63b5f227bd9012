#pragma once

// Mixed directional derivatives of scalar maps of a few probe parameters,
// evaluated at the origin of parameter space.

#include "infogeo/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace infogeo {

enum class DiffMethod { central_fd, central_fd_richardson, taylor_jet };

inline constexpr int kMaxDerivativeOrder = 5;

const char* to_string(DiffMethod m);
DiffMethod parse_method(const std::string& name);  // "fd", "fd-richardson", "jet"

/// Scalar map s -> f(s) of `arity` probe parameters.
struct ProbeFunction {
  int arity = 0;
  Lifted<Vec, Scalar> evaluator;
};

struct DerivSpec {
  std::vector<int> multi_index;
  DiffMethod method = DiffMethod::taylor_jet;
  /// Overrides the default step for the total order of multi_index.
  std::optional<double> base_step;

  int order() const;
};

/// Default FD step for a derivative of the given total order.
double default_step(int total_order);

/// d^|m| f / ds^m at s = 0.
double mixed_partial(const ProbeFunction& f, const DerivSpec& spec);

/// Batched mixed_partial; FD stencil evaluations and jet evaluations are shared.
std::vector<double> derivative_table(const ProbeFunction& f, std::span<const DerivSpec> specs);

/// Tolerances are doubled for plain central differences.
inline double tolerance_scale(DiffMethod m) { return m == DiffMethod::central_fd ? 2.0 : 1.0; }

}  // namespace infogeo
