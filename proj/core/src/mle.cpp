#include "mpstomo/mle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "mpstomo/error.hpp"
#include "mpstomo/gradient.hpp"
#include "mpstomo/parallel.hpp"
#include "mpstomo/rng.hpp"

namespace mpstomo {

OptimizerMethod parse_optimizer_method(const std::string& name) {
  if (name == "adam") return OptimizerMethod::adam;
  if (name == "sgd_nesterov" || name == "sgd-nesterov") return OptimizerMethod::sgd_nesterov;
  throw ArgumentError("unknown optimizer '" + name + "' (adam, sgd-nesterov)");
}

std::string to_string(OptimizerMethod m) { return m == OptimizerMethod::adam ? "adam" : "sgd_nesterov"; }

LearningSchedule parse_learning_schedule(const std::string& name) {
  if (name == "constant") return LearningSchedule::constant;
  if (name == "cosine" || name == "cosine_annealing" || name == "cosine-annealing") {
    return LearningSchedule::cosine_annealing;
  }
  throw ArgumentError("unknown schedule '" + name + "' (constant, cosine)");
}

std::string to_string(LearningSchedule s) {
  return s == LearningSchedule::constant ? "constant" : "cosine_annealing";
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  if (!(final_learning_rate >= 0.0)) throw ArgumentError("final_learning_rate must be non-negative");
  if (restarts < 1) throw ArgumentError("restarts must be at least 1");
  if (max_epochs < 1) throw ArgumentError("max_epochs must be at least 1");
  if (stop_window < 1) throw ArgumentError("stop_window must be at least 1");
  if (!(init_scale > 0.0)) throw ArgumentError("init_scale must be positive");
  if (screen_epochs < 0) throw ArgumentError("screen_epochs must be non-negative");
}

std::size_t OptimizerConfig::batch_size(std::size_t samples) const {
  if (minibatch_size) return *minibatch_size == 0 ? samples : std::min(*minibatch_size, samples);
  return samples < kFullBatchLimit ? samples : kDefaultMinibatch;
}

namespace {

constexpr std::size_t kEvalBlock = 256;
/// Tensors are rescaled to Tr(rho) = 1 once |log Tr(rho)| exceeds this.
constexpr double kRenormalizeLogZ = 5.0;

struct Evaluation {
  double nll = 0.0;
  RVector grad;
};

std::string describe_zero(std::span<const std::uint8_t> m) {
  return "degenerate model: P(m) = 0 for sample outcome " + format_outcome(m);
}

/// NLL over weighted outcomes, and its gradient when table is given.
Evaluation evaluate(const LikelihoodEngine& engine, const std::vector<Outcome>& outcomes,
                    const std::vector<double>& weights, const std::vector<ParameterIndex>* table,
                    const CVector* dirs, int workers) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ArgumentError("NLL needs at least one sample");
  const auto blocks = block_plan(outcomes.size(), kEvalBlock);
  std::vector<double> partial_nll(blocks.size(), 0.0);
  std::vector<TensorGrad> partial_grad(table ? blocks.size() : 0);
  parallel_for(blocks.size(), workers, [&](std::size_t b) {
    TensorGrad* g = nullptr;
    if (table) {
      partial_grad[b] = zero_grad(engine.model());
      g = &partial_grad[b];
    }
    double acc = 0.0;
    for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i) {
      const double w = weights[i] / total;
      try {
        acc -= w * engine.log_prob(outcomes[i], -w, g);
      } catch (const IntegrityError&) {
        throw IntegrityError(describe_zero(outcomes[i]));
      }
    }
    partial_nll[b] = acc;
  });
  Evaluation out;
  TensorGrad* g = nullptr;
  TensorGrad sum;
  if (table) {
    sum = zero_grad(engine.model());
    for (const auto& pg : partial_grad) {
      for (std::size_t s = 0; s < sum.size(); ++s) {
        for (int p = 0; p < sum[s].phys_dim(); ++p) sum[s][p] += pg[s][p];
      }
    }
    g = &sum;
  }
  for (double v : partial_nll) out.nll += v;
  out.nll += engine.log_z(1.0, g);
  if (table) out.grad = project(*table, *dirs, sum);
  return out;
}

std::vector<double> unit_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

void rescale(Mpdo& model, double log_z) {
  const double factor = std::exp(-log_z / (2.0 * model.n_sites()));
  for (auto& t : model.stored_sites()) {
    for (int p = 0; p < t.phys_dim(); ++p) t[p] *= factor;
  }
}

/// One optimization run from a random start; can be advanced in stages.
class Run {
 public:
  Run(const SampleSet& samples, const OutcomeHistogram& hist, const ModelShape& shape,
      const OptimizerConfig& config, int restart, int workers)
      : samples_(samples), hist_(hist), config_(config), workers_(workers), rng_(config.seed, restart) {
    Mpdo init = random_model(samples.n_sites(), shape.chi, shape.kappa, shape.ti, shape.realness, false,
                             config.init_scale, rng_);
    spec_ = ModelSpec{shape.realness, shape.ti, false, false, init};
    table_ = parameter_table(spec_);
    dirs_ = parameter_directions(table_, init);
    theta_ = pack(table_, init);
    best_theta_ = theta_;
    moment1_ = RVector::Zero(theta_.size());
    moment2_ = RVector::Zero(theta_.size());
    batch_ = config.batch_size(samples.size());
  }

  int epoch() const { return epoch_; }
  bool finished() const { return stopped_ || trace_.diverged || epoch_ >= config_.max_epochs; }
  const RestartTrace& trace() const { return trace_; }
  double best_nll() const { return best_nll_; }

  void advance(int until_epoch) {
    try {
      while (!finished() && epoch_ < until_epoch) {
        const double lr = learning_rate();
        const double loss = batch_ >= samples_.size() ? full_batch_epoch(lr) : minibatch_epoch(lr);
        if (!std::isfinite(loss) || !theta_.allFinite()) {
          trace_.diverged = true;
          trace_.failure = "non-finite parameters or NLL at epoch " + std::to_string(epoch_);
          break;
        }
        trace_.nll.push_back(loss);
        ++epoch_;
        const auto w = static_cast<std::size_t>(config_.stop_window);
        if (trace_.nll.size() > w && trace_.nll[trace_.nll.size() - 1 - w] - loss < config_.stop_tol) {
          stopped_ = true;
        }
      }
    } catch (const IntegrityError& e) {
      trace_.diverged = true;
      trace_.failure = e.what();
    }
  }

  /// Best parameters seen (full batch) or the final ones (minibatch), with their full-data NLL.
  std::pair<Mpdo, double> result() const {
    Mpdo model = unpack(table_, batch_ >= samples_.size() ? best_theta_ : theta_, spec_.anchor);
    const LikelihoodEngine engine(model);
    rescale(model, engine.log_z());
    return {model, nll(model, hist_)};
  }

 private:
  double learning_rate() const {
    if (config_.schedule == LearningSchedule::constant) return config_.learning_rate;
    const double t = static_cast<double>(epoch_) / config_.max_epochs;
    return config_.final_learning_rate +
           0.5 * (config_.learning_rate - config_.final_learning_rate) * (1.0 + std::cos(M_PI * t));
  }

  LikelihoodEngine engine_at_theta() {
    Mpdo model = unpack(table_, theta_, spec_.anchor);
    LikelihoodEngine engine(model);
    const double log_z = engine.log_z();
    if (std::abs(log_z) > kRenormalizeLogZ && std::isfinite(log_z)) {
      rescale(model, log_z);
      theta_ = pack(table_, model);
      return LikelihoodEngine(model);
    }
    return engine;
  }

  double full_batch_epoch(double lr) {
    const LikelihoodEngine engine = engine_at_theta();
    const Evaluation e = evaluate(engine, hist_.outcomes, hist_.counts, &table_, &dirs_, workers_);
    if (e.nll < best_nll_) {
      best_nll_ = e.nll;
      best_theta_ = theta_;
    }
    step(e.grad, lr);
    return e.nll;
  }

  double minibatch_epoch(double lr) {
    std::vector<std::size_t> order(samples_.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng_.next() % i]);
    }
    double loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_) {
      const std::size_t end = std::min(order.size(), begin + batch_);
      std::vector<Outcome> batch;
      batch.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const auto m = samples_[order[i]];
        batch.emplace_back(m.begin(), m.end());
      }
      const LikelihoodEngine engine = engine_at_theta();
      const Evaluation e = evaluate(engine, batch, unit_weights(batch.size()), &table_, &dirs_, workers_);
      loss += e.nll * static_cast<double>(end - begin);
      seen += end - begin;
      step(e.grad, lr);
    }
    const double mean = loss / static_cast<double>(seen);
    best_nll_ = std::min(best_nll_, mean);
    return mean;
  }

  void step(const RVector& grad, double lr) {
    ++steps_;
    if (config_.method == OptimizerMethod::adam) {
      moment1_ = config_.beta1 * moment1_ + (1.0 - config_.beta1) * grad;
      moment2_ = config_.beta2 * moment2_ + (1.0 - config_.beta2) * grad.cwiseAbs2();
      const double c1 = 1.0 - std::pow(config_.beta1, steps_);
      const double c2 = 1.0 - std::pow(config_.beta2, steps_);
      theta_.array() -= lr * (moment1_.array() / c1) / ((moment2_.array() / c2).sqrt() + config_.epsilon);
    } else {
      moment1_ = config_.momentum * moment1_ + grad;
      theta_ -= lr * (grad + config_.momentum * moment1_);
    }
  }

  const SampleSet& samples_;
  const OutcomeHistogram& hist_;
  const OptimizerConfig& config_;
  int workers_;
  Rng rng_;
  ModelSpec spec_;
  std::vector<ParameterIndex> table_;
  CVector dirs_;
  RVector theta_, best_theta_, moment1_, moment2_;
  std::size_t batch_ = 0;
  int epoch_ = 0;
  long steps_ = 0;
  bool stopped_ = false;
  double best_nll_ = std::numeric_limits<double>::infinity();
  RestartTrace trace_;
};

}  // namespace

double nll(const Mpdo& model, const OutcomeHistogram& hist) {
  const LikelihoodEngine engine(model);
  return evaluate(engine, hist.outcomes, hist.counts, nullptr, nullptr, 1).nll;
}

double nll(const Mpdo& model, const SampleSet& samples) {
  if (samples.n_sites() != model.n_sites()) throw ArgumentError("samples and model have different site counts");
  return nll(model, histogram(samples));
}

RVector nll_gradient(const ModelSpec& spec, const OutcomeHistogram& hist, int workers) {
  if (hist.n_sites != spec.n_sites()) throw ArgumentError("samples and model have different site counts");
  const auto table = parameter_table(spec);
  const CVector dirs = parameter_directions(table, spec.anchor);
  const LikelihoodEngine engine(spec.anchor);
  return evaluate(engine, hist.outcomes, hist.counts, &table, &dirs, workers).grad;
}

RVector nll_gradient(const ModelSpec& spec, const SampleSet& samples) {
  return nll_gradient(spec, histogram(samples));
}

State ReconstructionResult::state() const {
  if (model.kappa() == 1) return State{model.to_mps()};
  return State{model};
}

ReconstructionResult reconstruct(const SampleSet& samples, const ModelShape& shape, const OptimizerConfig& config,
                                 const std::optional<State>& target) {
  config.validate();
  if (samples.size() == 0) throw ArgumentError("reconstruction needs at least one sample");
  if (shape.chi < 1 || shape.kappa < 1) throw ArgumentError("model chi and kappa must be positive");
  if (target && n_sites(*target) != samples.n_sites()) {
    throw ArgumentError("target and samples have different site counts");
  }
  const auto start = std::chrono::steady_clock::now();
  const OutcomeHistogram hist = histogram(samples);
  const int workers = resolve_workers(config.workers);
  const bool outer = config.restarts > 1 && workers > 1;
  const int inner_workers = outer ? 1 : workers;
  const int outer_workers = outer ? workers : 1;

  std::vector<Run> runs;
  runs.reserve(config.restarts);
  for (int r = 0; r < config.restarts; ++r) runs.emplace_back(samples, hist, shape, config, r, inner_workers);

  const int first_stage = config.screen_epochs > 0 ? std::min(config.screen_epochs, config.max_epochs)
                                                   : config.max_epochs;
  parallel_for(runs.size(), outer_workers, [&](std::size_t r) { runs[r].advance(first_stage); });
  if (first_stage < config.max_epochs) {
    int leader = -1;
    for (int r = 0; r < config.restarts; ++r) {
      if (runs[r].trace().diverged) continue;
      if (leader < 0 || runs[r].best_nll() < runs[leader].best_nll()) leader = r;
    }
    if (leader >= 0) runs[leader].advance(config.max_epochs);
  }

  ReconstructionResult out;
  bool found = false;
  for (int r = 0; r < config.restarts; ++r) {
    out.restarts.push_back(runs[r].trace());
    if (runs[r].trace().diverged) continue;
    try {
      auto [model, value] = runs[r].result();
      if (!std::isfinite(value)) continue;
      if (!found || value < out.final_nll) {
        out.model = std::move(model);
        out.final_nll = value;
        out.best_restart = r;
        found = true;
      }
    } catch (const IntegrityError& e) {
      out.restarts.back().diverged = true;
      out.restarts.back().failure = e.what();
    }
  }
  if (!found) {
    std::string detail;
    for (std::size_t r = 0; r < out.restarts.size(); ++r) {
      detail += "\n  restart " + std::to_string(r) + ": " + out.restarts[r].failure;
    }
    throw OptimizationError("all restarts diverged" + detail);
  }
  if (target) out.metrics = compute_metrics(out.state(), *target);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<BondScanEntry> bond_dimension_scan(const SampleSet& samples, const ModelShape& shape,
                                               const OptimizerConfig& config) {
  std::vector<BondScanEntry> out;
  double reference = 0.0;
  for (int chi = std::max(1, shape.chi - 1); chi <= shape.chi + 1; ++chi) {
    ModelShape s = shape;
    s.chi = chi;
    const double value = reconstruct(samples, s, config).final_nll;
    if (chi == shape.chi) reference = value;
    out.push_back({chi, value, 0.0});
  }
  for (auto& e : out) e.delta = e.nll - reference;
  return out;
}

}  // namespace mpstomo
