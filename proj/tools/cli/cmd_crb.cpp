#include <iostream>

#include "common.hpp"
#include "mpstomo/crb.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/states.hpp"

namespace mpstomo::cli {

namespace {

struct CrbFlags {
  std::string state;
  ModelFlags model;
  std::string fisher = "auto";
  std::size_t mc_max = 100000;
  std::size_t mc_initial = 1024;
  double mc_tol = 0.01;
  double cutoff = kDefaultCutoff;
  double leak_tol = kDefaultLeakTol;
  double m = 0.0;
};

FisherMatrix fisher_for(const ModelSpec& spec, const CrbFlags& f, const GlobalOptions& global) {
  std::string method = f.fisher;
  if (method == "auto") {
    if (spec.ti && spec.pure() && (spec.diagonal_only || spec.phase_only)) {
      method = "exact-diagonal";
    } else if (spec.n_sites() <= kFisherExactMaxSites) {
      method = "exact";
    } else {
      method = "monte-carlo";
    }
  }
  if (method == "exact") return fisher_exact(spec);
  if (method == "exact-diagonal") return fisher_exact_diagonal_ti(spec);
  MonteCarloOptions options;
  options.max_samples = f.mc_max;
  options.initial_samples = f.mc_initial;
  options.convergence_tol = f.mc_tol;
  options.seed = global.seed;
  options.workers = global.workers;
  return fisher_monte_carlo(spec, options);
}

}  // namespace

void add_crb(CLI::App& app, GlobalOptions& global, Action& action) {
  auto f = std::make_shared<CrbFlags>();
  CLI::App* sub = app.add_subcommand("crb", "Cramer-Rao bound Tr(K I^+) of a target under a model class");
  sub->add_option("--state", f->state, "Target state file")->required();
  f->model.add_to(*sub);
  sub->add_option("--fisher", f->fisher, "auto | exact | exact-diagonal | monte-carlo")
      ->check(CLI::IsMember({"auto", "exact", "exact-diagonal", "monte-carlo"}))
      ->capture_default_str();
  sub->add_option("--mc-max", f->mc_max, "Monte Carlo sample budget")->capture_default_str();
  sub->add_option("--mc-initial", f->mc_initial, "First Monte Carlo checkpoint")->capture_default_str();
  sub->add_option("--mc-tol", f->mc_tol, "Relative Frobenius change that ends the doubling")->capture_default_str();
  sub->add_option("--cutoff", f->cutoff, "Relative eigenvalue cutoff of the pseudo-inverse")->capture_default_str();
  sub->add_option("--leak-tol", f->leak_tol, "Allowed K leakage onto dropped directions")->capture_default_str();
  sub->add_option("--m", f->m, "Sample size for the infidelity bound");
  sub->callback([&global, &action, f, sub] {
    action = [&global, f, sub] {
      Manifest manifest("crb", global, *sub);
      const State target = load_state_input(f->state, manifest);
      const ModelSpec spec = f->model.build(target);
      const KMatrix k = k_matrix(spec);
      const FisherMatrix fisher = fisher_for(spec, *f, global);
      const CrbResult r = crb_trace(k.values, fisher.values, f->cutoff, f->leak_tol);
      if (!fisher.converged) {
        std::cerr << "warning: Monte Carlo Fisher matrix did not converge within " << fisher.samples_used
                  << " samples (last relative change " << fisher.last_change << ")\n";
      }
      const int n = spec.n_sites();
      if (global.format(Format::json) == Format::csv) {
        emit(global, manifest,
             "N,tr_ki,bound_per_sample\n" + std::to_string(n) + "," + csv_number(r.tr_ki) + "," +
                 csv_number(infidelity_bound(r.tr_ki, 1.0)) + "\n");
        return;
      }
      json model = f->model.to_json();
      model["n_parameters"] = k.values.rows();
      json doc{{"n", n},
               {"model", model},
               {"tr_ki", r.tr_ki},
               {"discarded_dim", r.discarded_dim},
               {"max_leak", r.max_leak},
               {"fisher_provenance", fisher.provenance},
               {"samples_used", fisher.samples_used},
               {"converged", fisher.converged}};
      if (fisher.provenance == "monte_carlo") doc["last_change"] = fisher.last_change;
      if (f->m > 0.0) {
        doc["m"] = f->m;
        doc["infidelity_bound"] = infidelity_bound(r.tr_ki, f->m);
      }
      emit(global, manifest, doc.dump(2) + "\n");
    };
  });
}

void add_ghz_analytic(CLI::App& app, GlobalOptions& global, Action& action) {
  auto n = std::make_shared<int>(0);
  auto model = std::make_shared<ModelFlags>();
  CLI::App* sub = app.add_subcommand("ghz-analytic", "Closed-form K and I of the GHZ state");
  sub->add_option("--n", *n, "Number of sites (>= 3)")->required();
  sub->add_option("--model", model->realness, "Model realness")
      ->check(CLI::IsMember({"real", "complex"}))
      ->capture_default_str();
  sub->add_flag("--ti", model->ti, "Translation-invariant model");
  sub->callback([&global, &action, n, model, sub] {
    action = [&global, n, model, sub] {
      Manifest manifest("ghz-analytic", global, *sub);
      const GhzAnalytic a = ghz_analytic_ki(*n, model->ti, parse_realness(model->realness));
      const CrbResult r = crb_trace(a.k.values, a.fisher.values);
      if (global.format(Format::json) == Format::csv) {
        emit(global, manifest,
             "N,tr_ki,gamma,delta\n" + std::to_string(*n) + "," + csv_number(r.tr_ki) + "," +
                 csv_number(a.coefficients.gamma) + "," + csv_number(a.coefficients.delta) + "\n");
        return;
      }
      json doc{{"n", *n},
               {"model", {{"realness", model->realness}, {"ti", model->ti}, {"diagonal_only", true}}},
               {"gamma", a.coefficients.gamma},
               {"delta", a.coefficients.delta},
               {"k", matrix_json(a.k.values)},
               {"fisher", matrix_json(a.fisher.values)},
               {"tr_ki", r.tr_ki},
               {"discarded_dim", r.discarded_dim}};
      emit(global, manifest, doc.dump(2) + "\n");
    };
  });
}

}  // namespace mpstomo::cli
