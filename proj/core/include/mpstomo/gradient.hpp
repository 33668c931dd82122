#pragma once

#include <array>
#include <span>
#include <vector>

#include "mpstomo/parameters.hpp"
#include "mpstomo/probability.hpp"
#include "mpstomo/sic.hpp"

namespace mpstomo {

/// log P(m), log Z and their Wirtinger derivatives for one model state.
/// Pure models (kappa = 1) use the amplitude chain Phi = Tr(F_1 ... F_N);
/// mixed models use the chi^2-dimensional B chain. Every derivative comes out
/// of one prefix/suffix sweep, and translation-invariant tensors accumulate
/// the per-position insertions into their single stored tensor.
class LikelihoodEngine {
 public:
  explicit LikelihoodEngine(const Mpdo& model, const SicEffects& sic = sic_effects());

  int n_sites() const { return n_; }
  const Mpdo& model() const { return model_; }

  /// Returns log P(m) of the unnormalized model; if grad is given, adds
  /// weight * dlogP/dz to it. Throws IntegrityError when P(m) = 0.
  double log_prob(std::span<const std::uint8_t> m, double weight = 0.0, TensorGrad* grad = nullptr) const;

  /// Returns log Tr(rho); if grad is given, adds weight * dlogZ/dz.
  double log_z(double weight = 0.0, TensorGrad* grad = nullptr) const;

 private:
  double log_prob_pure(std::span<const std::uint8_t> m, double weight, TensorGrad* grad) const;
  double log_prob_mixed(std::span<const std::uint8_t> m, double weight, TensorGrad* grad) const;

  Mpdo model_;
  int n_ = 0;
  int kappa_ = 1;
  bool pure_ = false;
  std::array<cplx, 8> phi_conj_{};  // conj(phi_m(s)) at [m * 2 + s]
  /// f_[stored][m * kappa + k] = sum_s conj(phi_m(s)) C_k^s.
  std::vector<std::vector<CMatrix>> f_;
  /// b_[stored][m] = sum_k F_k^m (x) conj(F_k^m).
  std::vector<std::array<CMatrix, 4>> b_;
  std::vector<CMatrix> marginal_;
  int stored_index(int site) const { return model_.translationally_invariant() ? 0 : site; }
};

/// Projected d log P(m) / d theta over the model's parameter table, at the anchor.
RVector grad_log_prob(const ModelSpec& spec, std::span<const std::uint8_t> m);

}  // namespace mpstomo
