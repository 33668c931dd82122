#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mpstomo/sic.hpp"
#include "mpstomo/state.hpp"
#include "mpstomo/tensor.hpp"

namespace mpstomo {

/// Outcome string as small integers 0..3.
using Outcome = std::vector<std::uint8_t>;

Outcome parse_outcome(const std::string& quarts);
std::string format_outcome(std::span<const std::uint8_t> outcome);

/// Values in [-kNegativeFloor, 0) of P(m) / Tr(rho) are treated as roundoff.
inline constexpr double kNegativeFloor = 1e-12;

struct ConditionalValues {
  /// Tr(B_1^{m_1} ... B_i^{m} BB_{i+1} ... BB_N) for m = 0..3.
  std::array<double, 4> raw{};
  std::array<double, 4> normalized{};
};

/// P(m) = Tr(B_1^{m_1} ... B_N^{m_N}) with B_i^m = sum_{ss'} conj(phi_m(s)) phi_m(s') A_i^{ss'}.
/// Suffix products of the marginals BB_i = sum_m B_i^m are cached at build time.
class ProbabilityMpo {
 public:
  explicit ProbabilityMpo(const State& state, const SicEffects& sic = sic_effects());

  int n_sites() const { return n_; }
  const CMatrix& b(int site, int m) const { return b_[site][m]; }
  const CMatrix& marginal(int site) const { return marginal_[site]; }
  bool pure() const { return pure_; }
  /// Tr(rho) = Tr(BB_1 ... BB_N).
  double trace() const { return trace_; }

  /// Unnormalized P(m). Roundoff negatives are clamped to zero and counted.
  double outcome_probability(std::span<const std::uint8_t> m) const;
  double outcome_probability(const std::string& m) const;

  ConditionalValues conditional_distribution(std::span<const std::uint8_t> prefix) const;
  ConditionalValues conditional_distribution(const std::string& prefix) const;

  /// Draws one outcome by sequential conditionals; u supplies uniforms in [0, 1).
  template <class UniformSource>
  Outcome draw(UniformSource&& u) const;

  std::uint64_t clamp_count() const { return clamps_->load(); }

 private:
  double clamp(double p, std::span<const std::uint8_t> m) const;
  /// Picks m_i from the four chain values and advances the left environment.
  int step(int site, CMatrix& left, double uniform) const;

  int n_ = 0;
  bool pure_ = false;
  double trace_ = 0.0;
  std::vector<std::array<CMatrix, 4>> b_;
  std::vector<CMatrix> marginal_;
  /// Pure states: F_i^m = sum_s conj(phi_m(s)) C_i^s, so P(m) = |Tr(F_1 ... F_N)|^2.
  std::vector<std::array<CMatrix, 4>> f_;
  /// suffix_[i] = BB_i ... BB_{N-1} / scale, suffix_[N] = identity.
  std::vector<CMatrix> suffix_;
  std::vector<double> suffix_log_scale_;
  std::shared_ptr<std::atomic<std::uint64_t>> clamps_;
};

template <class UniformSource>
Outcome ProbabilityMpo::draw(UniformSource&& u) const {
  Outcome out(n_);
  CMatrix left = CMatrix::Identity(suffix_[n_].rows(), suffix_[n_].rows());
  for (int i = 0; i < n_; ++i) out[i] = static_cast<std::uint8_t>(step(i, left, u()));
  return out;
}

/// Dense P(m) for every outcome, outcome index = sum_i m_i 4^{N-1-i}. Oracle only.
std::vector<double> dense_outcome_probabilities(const CMatrix& rho, int n_sites,
                                                const SicEffects& sic = sic_effects());

}  // namespace mpstomo
