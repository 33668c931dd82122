#pragma once

#include <optional>

#include "mpstomo/state.hpp"

namespace mpstomo {

/// R = Tr[(rho_a - rho_b)^2] with both states divided by their trace.
double distance_r(const State& a, const State& b);

/// R / Tr(rho_target^2), purity taken after trace normalization.
double distance_d(const State& model, const State& target);

/// |<a|b>|^2 / (<a|a><b|b>); both states must be pure.
double fidelity_pure(const State& a, const State& b);

struct Metrics {
  double r = 0.0;
  double d = 0.0;
  /// Present when both states are pure.
  std::optional<double> fidelity;
};

Metrics compute_metrics(const State& model, const State& target);

}  // namespace mpstomo
