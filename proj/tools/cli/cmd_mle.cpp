#include <cmath>
#include <fstream>
#include <iostream>

#include "common.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/mle.hpp"
#include "mpstomo/rng.hpp"

namespace mpstomo::cli {

namespace {

struct MleFlags {
  std::vector<std::string> samples;
  std::string target;
  std::string config;
  std::string nll_csv;
  int chi = 2;
  int kappa = 1;
  std::string realness = "complex";
  bool ti = false;
  bool bond_scan = false;
  OptimizerConfig opt;
  std::string method = "adam";
  std::string schedule = "cosine_annealing";
  std::size_t minibatch = 0;
};

void read_optimizer_config(MleFlags& f, const CLI::App& sub) {
  if (f.config.empty()) return;
  json doc;
  try {
    doc = json::parse(read_file(f.config));
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("optimizer config is not valid JSON: ") + e.what());
  }
  const auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  OptimizerConfig& c = f.opt;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "method") {
        if (!given("--optimizer")) f.method = v.get<std::string>();
      } else if (key == "learning_rate") {
        if (!given("--lr")) c.learning_rate = v.get<double>();
      } else if (key == "final_learning_rate") {
        if (!given("--final-lr")) c.final_learning_rate = v.get<double>();
      } else if (key == "schedule") {
        if (!given("--schedule")) f.schedule = v.get<std::string>();
      } else if (key == "max_epochs") {
        if (!given("--epochs")) c.max_epochs = v.get<int>();
      } else if (key == "minibatch_size") {
        if (!given("--minibatch")) f.minibatch = v.get<std::size_t>();
      } else if (key == "stop_tol") {
        if (!given("--stop-tol")) c.stop_tol = v.get<double>();
      } else if (key == "stop_window") {
        if (!given("--stop-window")) c.stop_window = v.get<int>();
      } else if (key == "restarts") {
        if (!given("--restarts")) c.restarts = v.get<int>();
      } else if (key == "init_scale") {
        if (!given("--init-scale")) c.init_scale = v.get<double>();
      } else if (key == "screen_epochs") {
        if (!given("--screen-epochs")) c.screen_epochs = v.get<int>();
      } else if (key == "momentum") {
        c.momentum = v.get<double>();
      } else if (key == "beta1") {
        c.beta1 = v.get<double>();
      } else if (key == "beta2") {
        c.beta2 = v.get<double>();
      } else if (key == "epsilon") {
        c.epsilon = v.get<double>();
      } else {
        throw ArgumentError("unknown optimizer config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("optimizer config: ") + e.what());
  }
}

json metrics_json(const Metrics& m) {
  json doc{{"r", m.r}, {"d", m.d}};
  if (m.fidelity) {
    doc["fidelity"] = *m.fidelity;
    doc["infidelity"] = 1.0 - *m.fidelity;
  }
  return doc;
}

json mean_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  return {{"mean", mean}, {"std", sd}};
}

json result_json(const ReconstructionResult& r, const std::string& samples_path) {
  json restarts = json::array();
  for (const auto& t : r.restarts) {
    json entry{{"epochs", t.nll.size()}, {"diverged", t.diverged}};
    entry["final_nll"] = t.nll.empty() ? json(nullptr) : json(t.nll.back());
    if (t.diverged) entry["failure"] = t.failure;
    restarts.push_back(std::move(entry));
  }
  json doc{{"samples", samples_path},
           {"final_nll", r.final_nll},
           {"best_restart", r.best_restart},
           {"restarts", restarts}};
  if (r.metrics) doc["metrics"] = metrics_json(*r.metrics);
  doc["model"] = json::parse(serialize_state(r.state()));
  return doc;
}

void write_nll_csv(const std::string& path, const std::vector<ReconstructionResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << "set,restart,epoch,nll\n";
  for (std::size_t s = 0; s < results.size(); ++s) {
    const auto& restarts = results[s].restarts;
    for (std::size_t r = 0; r < restarts.size(); ++r) {
      for (std::size_t e = 0; e < restarts[r].nll.size(); ++e) {
        out << s << "," << r << "," << e << "," << csv_number(restarts[r].nll[e]) << "\n";
      }
    }
  }
}

}  // namespace

void add_mle(CLI::App& app, GlobalOptions& global, Action& action) {
  auto f = std::make_shared<MleFlags>();
  CLI::App* sub = app.add_subcommand("mle", "Maximum-likelihood reconstruction from sample files");
  sub->add_option("--samples", f->samples, "Sample file; several files run in batch mode")->required();
  sub->add_option("--target", f->target, "Target state file for R, D and fidelity");
  sub->add_option("--config", f->config, "JSON optimizer config");
  sub->add_option("--nll-csv", f->nll_csv, "Write per-epoch NLL of every restart");
  sub->add_option("--chi", f->chi, "Model bond dimension")->capture_default_str();
  sub->add_option("--kappa", f->kappa, "Model Kraus dimension")->capture_default_str();
  sub->add_option("--model", f->realness, "Model realness")
      ->check(CLI::IsMember({"real", "complex"}))
      ->capture_default_str();
  sub->add_flag("--ti", f->ti, "Translation-invariant model");
  sub->add_flag("--bond-scan", f->bond_scan, "Also report NLL at chi - 1 and chi + 1");
  sub->add_option("--optimizer", f->method, "adam | sgd_nesterov")->capture_default_str();
  sub->add_option("--lr", f->opt.learning_rate, "Initial learning rate")->capture_default_str();
  sub->add_option("--final-lr", f->opt.final_learning_rate, "Final cosine-annealed learning rate")
      ->capture_default_str();
  sub->add_option("--schedule", f->schedule, "constant | cosine_annealing")->capture_default_str();
  sub->add_option("--epochs", f->opt.max_epochs, "Maximum epochs per restart")->capture_default_str();
  sub->add_option("--minibatch", f->minibatch, "Minibatch size (0 = default rule)")->capture_default_str();
  sub->add_option("--stop-tol", f->opt.stop_tol, "NLL improvement that ends a restart")->capture_default_str();
  sub->add_option("--stop-window", f->opt.stop_window, "Epoch window of the stop rule")->capture_default_str();
  sub->add_option("--restarts", f->opt.restarts, "Random initializations")->capture_default_str();
  sub->add_option("--init-scale", f->opt.init_scale, "Half-width of the initial entries")->capture_default_str();
  sub->add_option("--screen-epochs", f->opt.screen_epochs, "Short screening run before the best restart continues")
      ->capture_default_str();
  sub->callback([&global, &action, f, sub] {
    action = [&global, f, sub] {
      read_optimizer_config(*f, *sub);
      Manifest manifest("mle", global, *sub);
      OptimizerConfig config = f->opt;
      config.method = parse_optimizer_method(f->method);
      config.schedule = parse_learning_schedule(f->schedule);
      if (f->minibatch > 0) config.minibatch_size = f->minibatch;
      config.workers = global.workers;
      config.validate();
      const ModelShape shape{f->chi, f->kappa, parse_realness(f->realness), f->ti};

      std::optional<State> target;
      std::string target_digest;
      if (!f->target.empty()) {
        target = load_state_input(f->target, manifest);
        target_digest = state_digest(*target);
      }
      const bool batch = f->samples.size() > 1;
      std::vector<ReconstructionResult> results;
      json sets = json::array();
      for (std::size_t s = 0; s < f->samples.size(); ++s) {
        const std::string& path = f->samples[s];
        const SampleSet samples = parse_samples(read_file(path));
        manifest.add_input(path, file_digest(path));
        if (target && !samples.state_digest().empty() && samples.state_digest() != target_digest) {
          std::cerr << "warning: " << path << " was drawn from state " << samples.state_digest()
                    << " but the target digest is " << target_digest << "\n";
        }
        config.seed = batch ? derive_seed(global.seed, s) : global.seed;
        manifest.add_seed(batch ? "set_" + std::to_string(s) : "optimizer", config.seed);
        results.push_back(reconstruct(samples, shape, config, target));
        json entry = result_json(results.back(), path);
        if (f->bond_scan) {
          json scan = json::array();
          for (const auto& b : bond_dimension_scan(samples, shape, config)) {
            scan.push_back({{"chi", b.chi}, {"nll", b.nll}, {"delta", b.delta}});
          }
          entry["bond_scan"] = scan;
        }
        sets.push_back(std::move(entry));
      }
      double wall = 0.0;
      for (const auto& r : results) wall += r.wall_seconds;
      manifest.set("optimizer_wall_seconds", wall);
      if (!f->nll_csv.empty()) write_nll_csv(f->nll_csv, results);

      if (global.format(Format::json) == Format::csv) {
        std::string text = "set,final_nll,r,d,fidelity\n";
        for (std::size_t s = 0; s < results.size(); ++s) {
          const auto& m = results[s].metrics;
          text += std::to_string(s) + "," + csv_number(results[s].final_nll) + ",";
          if (m) {
            text += csv_number(m->r) + "," + csv_number(m->d) + ",";
            if (m->fidelity) text += csv_number(*m->fidelity);
          } else {
            text += ",,";
          }
          text += "\n";
        }
        emit(global, manifest, text);
        return;
      }
      if (!batch) {
        emit(global, manifest, sets[0].dump(2) + "\n");
        return;
      }
      std::vector<double> nlls;
      std::vector<double> rs;
      std::vector<double> ds;
      std::vector<double> infid;
      for (const auto& r : results) {
        nlls.push_back(r.final_nll);
        if (r.metrics) {
          rs.push_back(r.metrics->r);
          ds.push_back(r.metrics->d);
          if (r.metrics->fidelity) infid.push_back(1.0 - *r.metrics->fidelity);
        }
      }
      json summary{{"sets", results.size()}, {"final_nll", mean_std(nlls)}};
      if (!rs.empty()) {
        summary["r"] = mean_std(rs);
        summary["d"] = mean_std(ds);
      }
      if (!infid.empty()) summary["infidelity"] = mean_std(infid);
      emit(global, manifest, json{{"summary", summary}, {"results", sets}}.dump(2) + "\n");
    };
  });
}

}  // namespace mpstomo::cli
