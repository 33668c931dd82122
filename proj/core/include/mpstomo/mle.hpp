#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpstomo/metrics.hpp"
#include "mpstomo/parameters.hpp"
#include "mpstomo/sampler.hpp"

namespace mpstomo {

enum class OptimizerMethod { adam, sgd_nesterov };
enum class LearningSchedule { constant, cosine_annealing };

OptimizerMethod parse_optimizer_method(const std::string& name);
std::string to_string(OptimizerMethod m);
LearningSchedule parse_learning_schedule(const std::string& name);
std::string to_string(LearningSchedule s);

/// Below this sample count the default is a full batch, above it minibatches of kDefaultMinibatch.
inline constexpr std::size_t kFullBatchLimit = 20000;
inline constexpr std::size_t kDefaultMinibatch = 2048;

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::adam;
  double learning_rate = 0.01;
  double final_learning_rate = 1e-4;
  LearningSchedule schedule = LearningSchedule::cosine_annealing;
  int max_epochs = 2000;
  /// 0 = full batch; unset = full batch below kFullBatchLimit samples, else kDefaultMinibatch.
  std::optional<std::size_t> minibatch_size;
  /// Stop once the NLL improved by less than stop_tol over stop_window epochs.
  double stop_tol = 1e-8;
  int stop_window = 100;
  int restarts = 10;
  double init_scale = 1.0;
  std::uint64_t seed = 0;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// When > 0, every restart runs this many epochs and only the one with the
  /// lowest NLL continues to max_epochs.
  int screen_epochs = 0;
  int workers = 1;

  void validate() const;
  std::size_t batch_size(std::size_t samples) const;
};

/// Model class used for reconstruction: every matrix element is free.
struct ModelShape {
  int chi = 2;
  int kappa = 1;
  Realness realness = Realness::complex;
  bool ti = false;
};

/// -(1/M) sum_m log P(m) + log Tr(rho). Throws IntegrityError naming the
/// outcome if some sample has P(m) = 0.
double nll(const Mpdo& model, const SampleSet& samples);
double nll(const Mpdo& model, const OutcomeHistogram& hist);

/// Gradient of nll over parameter_table(spec), evaluated at spec.anchor.
RVector nll_gradient(const ModelSpec& spec, const SampleSet& samples);
RVector nll_gradient(const ModelSpec& spec, const OutcomeHistogram& hist, int workers = 1);

struct RestartTrace {
  std::vector<double> nll;
  bool diverged = false;
  std::string failure;
};

struct ReconstructionResult {
  Mpdo model;
  double final_nll = 0.0;
  int best_restart = 0;
  std::vector<RestartTrace> restarts;
  std::optional<Metrics> metrics;
  double wall_seconds = 0.0;

  /// The model as a State: an MPS when kappa = 1.
  State state() const;
};

ReconstructionResult reconstruct(const SampleSet& samples, const ModelShape& shape, const OptimizerConfig& config,
                                 const std::optional<State>& target = std::nullopt);

struct BondScanEntry {
  int chi = 0;
  double nll = 0.0;
  /// nll minus the nll at the requested chi.
  double delta = 0.0;
};

/// Re-runs the reconstruction at chi - 1 (when >= 1), chi and chi + 1.
std::vector<BondScanEntry> bond_dimension_scan(const SampleSet& samples, const ModelShape& shape,
                                               const OptimizerConfig& config);

}  // namespace mpstomo
