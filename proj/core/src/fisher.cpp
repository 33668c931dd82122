#include "mpstomo/fisher.hpp"

#include <cmath>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/gradient.hpp"
#include "mpstomo/parallel.hpp"
#include "mpstomo/probability.hpp"
#include "mpstomo/rng.hpp"
#include "mpstomo/sampler.hpp"

namespace mpstomo {

namespace {

/// The anchor scaled to unit trace, and the factor used.
struct UnitTrace {
  Mpdo model;
  double factor;
};

UnitTrace unit_trace(const Mpdo& anchor) {
  const double tr = mpo_trace(mpo_from_mpdo(anchor)).real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw IntegrityError("Fisher matrix needs Tr(rho) > 0");
  UnitTrace out{anchor, std::exp(-std::log(tr) / (2.0 * anchor.n_sites()))};
  for (auto& t : out.model.stored_sites()) {
    for (int p = 0; p < t.phys_dim(); ++p) t[p] *= out.factor;
  }
  return out;
}

void reset(TensorGrad& g) {
  for (auto& t : g) {
    for (int p = 0; p < t.phys_dim(); ++p) t[p].setZero();
  }
}

}  // namespace

FisherMatrix fisher_exact(const ModelSpec& spec) {
  const int n = spec.n_sites();
  if (n > kFisherExactMaxSites) {
    throw GuardError("fisher_exact refused: " + std::to_string(n) + " sites exceeds guard of " +
                     std::to_string(kFisherExactMaxSites));
  }
  const auto table = parameter_table(spec);
  const UnitTrace ut = unit_trace(spec.anchor);
  const CVector dirs = parameter_directions(table, spec.anchor) * ut.factor;
  const LikelihoodEngine engine(ut.model);
  const Eigen::Index np = static_cast<Eigen::Index>(table.size());
  RMatrix info = RMatrix::Zero(np, np);
  TensorGrad g = zero_grad(ut.model);
  Outcome m(n, 0);
  const std::size_t total = std::size_t{1} << (2 * n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < n; ++i) m[i] = static_cast<std::uint8_t>((idx >> (2 * (n - 1 - i))) & 3);
    reset(g);
    double log_p;
    try {
      log_p = engine.log_prob(m, 1.0, &g);
    } catch (const IntegrityError&) {
      continue;  // P(m) = 0 outcomes carry no weight
    }
    const RVector v = project(table, dirs, g);
    info.selfadjointView<Eigen::Lower>().rankUpdate(v, std::exp(log_p));
  }
  FisherMatrix out;
  out.values = info.selfadjointView<Eigen::Lower>();
  out.provenance = "exact_sum";
  out.samples_used = total;
  return out;
}

FisherMatrix fisher_exact_diagonal_ti(const ModelSpec& spec) {
  if (!spec.ti || !spec.pure()) throw ArgumentError("diagonal exact sum needs a pure TI model");
  if (!spec.diagonal_only && !spec.phase_only) {
    throw ArgumentError("diagonal exact sum needs a diagonal_only or phase_only model");
  }
  const int n = spec.n_sites();
  const auto table = parameter_table(spec);
  const UnitTrace ut = unit_trace(spec.anchor);
  const CVector dirs = parameter_directions(table, spec.anchor) * ut.factor;
  const SiteTensor& c = ut.model.site(0);
  const int chi = c.left_dim();
  for (int s = 0; s < 2; ++s) {
    CMatrix off = c[s];
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 0.0) throw ArgumentError("diagonal exact sum needs diagonal site matrices");
  }
  const auto& sic = sic_effects();
  // f[m][d] = sum_s conj(phi_m(s)) c_{s,d}; pw[m][d][e] = f^e.
  std::vector<std::vector<std::vector<cplx>>> pw(4, std::vector<std::vector<cplx>>(chi, std::vector<cplx>(n + 1)));
  for (int m = 0; m < 4; ++m) {
    for (int d = 0; d < chi; ++d) {
      const cplx f = std::conj(sic.phi[m](0)) * c[0](d, d) + std::conj(sic.phi[m](1)) * c[1](d, d);
      pw[m][d][0] = 1.0;
      for (int e = 1; e <= n; ++e) pw[m][d][e] = pw[m][d][e - 1] * f;
    }
  }
  const Eigen::Index np = static_cast<Eigen::Index>(table.size());
  RMatrix info = RMatrix::Zero(np, np);
  TensorGrad g = zero_grad(ut.model);
  const double log_nfact = std::lgamma(n + 1.0);
  std::array<int, 4> cnt{};
  for (cnt[0] = 0; cnt[0] <= n; ++cnt[0]) {
    for (cnt[1] = 0; cnt[0] + cnt[1] <= n; ++cnt[1]) {
      for (cnt[2] = 0; cnt[0] + cnt[1] + cnt[2] <= n; ++cnt[2]) {
        cnt[3] = n - cnt[0] - cnt[1] - cnt[2];
        cplx phi = 0.0;
        std::vector<std::array<cplx, 4>> others(chi);  // product over m' != m
        for (int d = 0; d < chi; ++d) {
          for (int m = 0; m < 4; ++m) {
            cplx prod = 1.0;
            for (int mp = 0; mp < 4; ++mp) {
              if (mp != m) prod *= pw[mp][d][cnt[mp]];
            }
            others[d][m] = prod;
          }
          phi += others[d][0] * pw[0][d][cnt[0]];
        }
        const double p = std::norm(phi);
        if (p == 0.0) continue;
        reset(g);
        for (int d = 0; d < chi; ++d) {
          for (int s = 0; s < 2; ++s) {
            cplx dphi = 0.0;
            for (int m = 0; m < 4; ++m) {
              if (cnt[m] == 0) continue;
              dphi += static_cast<double>(cnt[m]) * pw[m][d][cnt[m] - 1] * std::conj(sic.phi[m](s)) * others[d][m];
            }
            g[0][s](d, d) = dphi / phi;
          }
        }
        double log_w = log_nfact;
        for (int m = 0; m < 4; ++m) log_w -= std::lgamma(cnt[m] + 1.0);
        const RVector v = project(table, dirs, g);
        info.selfadjointView<Eigen::Lower>().rankUpdate(v, std::exp(log_w) * p);
      }
    }
  }
  FisherMatrix out;
  out.values = info.selfadjointView<Eigen::Lower>();
  out.provenance = "exact_diagonal_ti";
  return out;
}

FisherMatrix fisher_monte_carlo(const ModelSpec& spec, const MonteCarloOptions& options) {
  if (options.max_samples < 1000) throw ArgumentError("Monte Carlo Fisher needs at least 1000 samples");
  if (options.initial_samples < 1) throw ArgumentError("initial sample count must be positive");
  const auto table = parameter_table(spec);
  const UnitTrace ut = unit_trace(spec.anchor);
  const CVector dirs = parameter_directions(table, spec.anchor) * ut.factor;
  const LikelihoodEngine engine(ut.model);
  const ProbabilityMpo prob(State{ut.model});
  const Eigen::Index np = static_cast<Eigen::Index>(table.size());
  const auto blocks = block_plan(options.max_samples, kSampleBlockSize);

  RMatrix sum = RMatrix::Zero(np, np);
  RMatrix previous;
  std::size_t done_blocks = 0;
  std::size_t used = 0;
  std::size_t checkpoint = std::min(options.initial_samples, options.max_samples);
  FisherMatrix out;
  out.provenance = "monte_carlo";
  out.converged = false;
  for (;;) {
    std::size_t end_block = done_blocks;
    while (end_block < blocks.size() && blocks[end_block].begin < checkpoint) ++end_block;
    std::vector<RMatrix> partial(end_block - done_blocks);
    parallel_for(partial.size(), options.workers, [&](std::size_t j) {
      const Block& block = blocks[done_blocks + j];
      Rng rng(options.seed, block.index);
      RMatrix grads(np, static_cast<Eigen::Index>(block.end - block.begin));
      TensorGrad g = zero_grad(ut.model);
      for (std::size_t k = block.begin; k < block.end; ++k) {
        const Outcome m = prob.draw([&] { return rng.uniform(); });
        reset(g);
        engine.log_prob(m, 1.0, &g);
        grads.col(static_cast<Eigen::Index>(k - block.begin)) = project(table, dirs, g);
      }
      partial[j] = RMatrix::Zero(np, np);
      partial[j].selfadjointView<Eigen::Lower>().rankUpdate(grads);
    });
    for (std::size_t j = 0; j < partial.size(); ++j) {
      sum += partial[j];
      used = blocks[done_blocks + j].end;
    }
    done_blocks = end_block;
    RMatrix current = sum.selfadjointView<Eigen::Lower>();
    current /= static_cast<double>(used);
    if (previous.size() > 0) {
      const double denom = current.norm();
      out.last_change = denom > 0.0 ? (current - previous).norm() / denom : 0.0;
      if (out.last_change < options.convergence_tol) out.converged = true;
    }
    previous = current;
    if (out.converged || done_blocks >= blocks.size()) break;
    checkpoint = std::min(checkpoint * 2, options.max_samples);
  }
  out.values = 0.5 * (previous + previous.transpose());
  out.samples_used = used;
  return out;
}

}  // namespace mpstomo
