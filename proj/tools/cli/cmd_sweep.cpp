#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "common.hpp"
#include "mpstomo/crb.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/mle.hpp"
#include "mpstomo/rng.hpp"
#include "mpstomo/states.hpp"

namespace mpstomo::cli {

namespace {

struct SweepFlags {
  std::string preset;
  int n_min = 0;
  int n_max = 0;
  int n_step = 0;
  int chi = 2;
  int states = 10;
  std::vector<std::string> models{"real", "complex"};
  std::size_t mc_max = 100000;
  std::vector<double> gammas;
  std::string kind = "random-mps";
  int n = 8;
  std::size_t m = 0;
  int sets = 10;
  double rot_gamma = std::numbers::pi / 3.0;
  int restarts = 4;
  int epochs = 2000;
  int screen_epochs = 0;
  double lr = 0.01;
};

std::vector<int> n_range(const SweepFlags& f, int lo, int hi, int step) {
  const int a = f.n_min > 0 ? f.n_min : lo;
  const int b = f.n_max > 0 ? f.n_max : hi;
  const int s = f.n_step > 0 ? f.n_step : step;
  if (a > b) throw ArgumentError("--n-min exceeds --n-max");
  std::vector<int> out;
  for (int n = a; n <= b; n += s) out.push_back(n);
  return out;
}

/// Least-squares slope of y against x with an intercept.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::string fig1(const SweepFlags& f, const GlobalOptions& g, json& summary) {
  std::ostringstream csv;
  csv << "model,n,chi,state,tr_ki,n_chi2,converged,samples_used\n";
  for (const std::string& model : f.models) {
    const Realness realness = parse_realness(model);
    std::vector<double> x;
    std::vector<double> y;
    for (int n : n_range(f, 4, 16, 2)) {
      for (int i = 0; i < f.states; ++i) {
        const std::uint64_t stream = static_cast<std::uint64_t>(n) * 1000 + i;
        const Mps target = random_mps(n, f.chi, Realness::real, derive_seed(g.seed, stream));
        const ModelSpec spec = make_model(State{target}, realness, false);
        MonteCarloOptions mc;
        mc.max_samples = f.mc_max;
        mc.seed = derive_seed(g.seed, stream + (std::uint64_t{1} << 32));
        mc.workers = g.workers;
        const FisherMatrix fisher = fisher_monte_carlo(spec, mc);
        const double tr = crb_trace(k_matrix(spec).values, fisher.values).tr_ki;
        const double nchi2 = static_cast<double>(n) * f.chi * f.chi;
        x.push_back(nchi2);
        y.push_back(tr);
        csv << model << "," << n << "," << f.chi << "," << i << "," << csv_number(tr) << "," << csv_number(nchi2)
            << "," << (fisher.converged ? 1 : 0) << "," << fisher.samples_used << "\n";
      }
    }
    summary["slope_" + model] = slope(x, y);
  }
  return csv.str();
}

std::string fig2(const SweepFlags& f, const GlobalOptions&, json& summary) {
  std::vector<double> gammas = f.gammas;
  if (gammas.empty()) {
    for (int i = 0; i <= 12; ++i) gammas.push_back(i * std::numbers::pi / 24.0);
  }
  const std::vector<int> ns = n_range(f, 20, 60, 4);
  std::ostringstream csv;
  csv << "rot_gamma,n,tr_ki,zeta\n";
  json zetas = json::array();
  for (double gamma : gammas) {
    const ZetaFit fit = zeta_fit(gamma, ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      csv << csv_number(gamma) << "," << ns[i] << "," << csv_number(fit.bounds[i]) << "," << csv_number(fit.zeta)
          << "\n";
    }
    zetas.push_back({{"rot_gamma", gamma}, {"zeta", fit.zeta}});
  }
  summary["zeta"] = zetas;
  return csv.str();
}

std::string fig3(const SweepFlags& f, const GlobalOptions& g, json& summary) {
  const StateKind kind = parse_state_kind(f.kind);
  ModelShape shape;
  State target;
  switch (kind) {
    case StateKind::random_mps: target = random_mps(f.n, 2, Realness::complex, g.seed); break;
    case StateKind::cluster: target = cluster_state(f.n); break;
    case StateKind::generalized_ghz:
      target = generalized_ghz(f.n, f.rot_gamma);
      shape.ti = true;
      break;
    default: throw ArgumentError("fig3 supports random-mps, cluster and generalized-ghz targets");
  }
  const std::size_t m = f.m > 0 ? f.m : (kind == StateKind::generalized_ghz ? 10000 : 5000);
  const ModelSpec spec = make_model(target, shape.realness, shape.ti);
  FisherMatrix fisher;
  if (f.n <= kFisherExactMaxSites) {
    fisher = fisher_exact(spec);
  } else {
    MonteCarloOptions mc;
    mc.max_samples = f.mc_max;
    mc.seed = derive_seed(g.seed, 0xF153);
    mc.workers = g.workers;
    fisher = fisher_monte_carlo(spec, mc);
  }
  const double bound = infidelity_bound(crb_trace(k_matrix(spec).values, fisher.values).tr_ki, static_cast<double>(m));

  OptimizerConfig config;
  config.restarts = f.restarts;
  config.max_epochs = f.epochs;
  config.screen_epochs = f.screen_epochs;
  config.learning_rate = f.lr;
  config.workers = g.workers;
  const ProbabilityMpo prob(target);
  std::ostringstream csv;
  csv << "set,m,infidelity,bound,ratio\n";
  double mean = 0.0;
  for (int s = 0; s < f.sets; ++s) {
    const SampleSet samples = sample(prob, m, derive_seed(g.seed, 1000 + s), g.workers);
    config.seed = derive_seed(g.seed, 2000 + s);
    const ReconstructionResult r = reconstruct(samples, shape, config, target);
    const double infidelity = 1.0 - r.metrics->fidelity.value_or(0.0);
    mean += infidelity / f.sets;
    csv << s << "," << m << "," << csv_number(infidelity) << "," << csv_number(bound) << ","
        << csv_number(infidelity / bound) << "\n";
  }
  summary["bound"] = bound;
  summary["mean_infidelity"] = mean;
  summary["ratio"] = mean / bound;
  return csv.str();
}

}  // namespace

void add_sweep(CLI::App& app, GlobalOptions& global, Action& action) {
  auto f = std::make_shared<SweepFlags>();
  CLI::App* sub = app.add_subcommand("sweep", "Parameter sweeps emitting plot-ready CSV");
  sub->add_option("preset", f->preset, "fig1 | fig2 | fig3")->required()->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  sub->add_option("--n-min", f->n_min, "Smallest N");
  sub->add_option("--n-max", f->n_max, "Largest N");
  sub->add_option("--n-step", f->n_step, "N increment");
  sub->add_option("--chi", f->chi, "fig1: bond dimension")->capture_default_str();
  sub->add_option("--states", f->states, "fig1: random states per N")->capture_default_str();
  sub->add_option("--models", f->models, "fig1: model realness list")->capture_default_str();
  sub->add_option("--mc-max", f->mc_max, "Monte Carlo Fisher budget")->capture_default_str();
  sub->add_option("--gammas", f->gammas, "fig2: rotation angles (default 0..pi/2 in pi/24 steps)");
  sub->add_option("--kind", f->kind, "fig3: random-mps | cluster | generalized-ghz")->capture_default_str();
  sub->add_option("--n", f->n, "fig3: number of sites")->capture_default_str();
  sub->add_option("--m", f->m, "fig3: samples per set (default 5000, 10000 for generalized-ghz)");
  sub->add_option("--sets", f->sets, "fig3: independent sample sets")->capture_default_str();
  sub->add_option("--rot-gamma", f->rot_gamma, "fig3: generalized GHZ angle")->capture_default_str();
  sub->add_option("--restarts", f->restarts, "fig3: MLE restarts")->capture_default_str();
  sub->add_option("--epochs", f->epochs, "fig3: MLE epoch budget")->capture_default_str();
  sub->add_option("--screen-epochs", f->screen_epochs, "fig3: MLE screening epochs")->capture_default_str();
  sub->add_option("--lr", f->lr, "fig3: MLE learning rate")->capture_default_str();
  sub->callback([&global, &action, f, sub] {
    action = [&global, f, sub] {
      Manifest manifest("sweep " + f->preset, global, *sub);
      json summary = json::object();
      std::string csv;
      if (f->preset == "fig1") {
        csv = fig1(*f, global, summary);
      } else if (f->preset == "fig2") {
        csv = fig2(*f, global, summary);
      } else {
        csv = fig3(*f, global, summary);
      }
      manifest.set("summary", summary);
      std::cerr << summary.dump() << "\n";
      if (global.format(Format::csv) == Format::json) {
        emit(global, manifest, json{{"preset", f->preset}, {"summary", summary}, {"csv", csv}}.dump(2) + "\n");
        return;
      }
      emit(global, manifest, "# mpstomo-sweep " + f->preset + " v1\n" + csv);
    };
  });
}

}  // namespace mpstomo::cli
