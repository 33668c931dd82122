#pragma once

#include <cstdint>
#include <string>

#include "mpstomo/parameters.hpp"

namespace mpstomo {

struct FisherMatrix {
  RMatrix values;
  /// "exact_sum", "exact_diagonal_ti", "monte_carlo" or "analytic".
  std::string provenance;
  std::size_t samples_used = 0;
  bool converged = true;
  /// Relative Frobenius change at the last doubling (Monte Carlo only).
  double last_change = 0.0;
};

/// Enumeration guard of fisher_exact.
inline constexpr int kFisherExactMaxSites = 8;

/// I = sum_m P(m) g g^T / Tr(rho) over all 4^N outcomes, g = d log P / d theta.
FisherMatrix fisher_exact(const ModelSpec& spec);

/// Same quantity for a pure TI model whose anchor and parameters are diagonal:
/// P(m) only depends on the outcome counts (N_0, N_1, N_2, N_3), so the sum
/// runs over count tuples with multinomial weights.
FisherMatrix fisher_exact_diagonal_ti(const ModelSpec& spec);

struct MonteCarloOptions {
  std::size_t max_samples = 100000;
  std::size_t initial_samples = 1024;
  double convergence_tol = 0.01;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Average of g g^T over autoregressive samples of the anchor. The sample
/// count doubles from initial_samples until the relative Frobenius change of
/// I falls below convergence_tol; hitting max_samples first leaves
/// converged = false.
FisherMatrix fisher_monte_carlo(const ModelSpec& spec, const MonteCarloOptions& options);

}  // namespace mpstomo
