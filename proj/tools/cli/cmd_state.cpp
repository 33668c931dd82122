#include <iostream>
#include <optional>

#include "common.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/metrics.hpp"
#include "mpstomo/sampler.hpp"
#include "mpstomo/states.hpp"

namespace mpstomo::cli {

namespace {

struct StateFlags {
  std::string kind;
  int n = 0;
  int chi = 2;
  int kappa = 1;
  std::string realness = "real";
  std::optional<double> rot_gamma;
  std::optional<double> phi1;
  std::optional<double> phi2;
  std::optional<double> field_b;
  std::optional<double> temperature;
  int compress_chi = 64;
  double compress_tol = 1e-10;
  std::string config;
};

/// Keys of a JSON StateSpec block; command-line flags win over the file.
void apply_config(StateFlags& f, const CLI::App& sub) {
  if (f.config.empty()) return;
  json doc;
  try {
    doc = json::parse(read_file(f.config));
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("state config is not valid JSON: ") + e.what());
  }
  const auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "kind") {
        if (!given("--kind")) f.kind = value.get<std::string>();
      } else if (key == "n_sites") {
        if (!given("--n")) f.n = value.get<int>();
      } else if (key == "chi") {
        if (!given("--chi")) f.chi = value.get<int>();
      } else if (key == "kappa") {
        if (!given("--kappa")) f.kappa = value.get<int>();
      } else if (key == "realness") {
        if (!given("--realness")) f.realness = value.get<std::string>();
      } else if (key == "rot_gamma") {
        if (!given("--rot-gamma")) f.rot_gamma = value.get<double>();
      } else if (key == "phi1") {
        if (!given("--phi1")) f.phi1 = value.get<double>();
      } else if (key == "phi2") {
        if (!given("--phi2")) f.phi2 = value.get<double>();
      } else if (key == "field_b") {
        if (!given("--field-b")) f.field_b = value.get<double>();
      } else if (key == "temperature") {
        if (!given("--temperature")) f.temperature = value.get<double>();
      } else if (key == "compress_chi_max") {
        if (!given("--compress-chi")) f.compress_chi = value.get<int>();
      } else if (key == "compress_tol") {
        if (!given("--compress-tol")) f.compress_tol = value.get<double>();
      } else if (key != "seed") {
        throw ArgumentError("unknown state config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("state config: ") + e.what());
  }
}

StateSpec to_spec(const StateFlags& f, std::uint64_t seed) {
  if (f.kind.empty()) throw ArgumentError("--kind is required");
  StateSpec spec;
  spec.kind = parse_state_kind(f.kind);
  spec.n_sites = f.n;
  spec.chi = f.chi;
  spec.kappa = f.kappa;
  spec.realness = parse_realness(f.realness);
  spec.rot_gamma = f.rot_gamma;
  spec.phi1 = f.phi1;
  spec.phi2 = f.phi2;
  spec.field_b = f.field_b;
  spec.temperature = f.temperature;
  if (spec.kind == StateKind::thermal_ising) {
    if (!spec.field_b) spec.field_b = 1.0;
    if (!spec.temperature) spec.temperature = 2.0;
  }
  spec.seed = seed;
  spec.compress_chi_max = f.compress_chi;
  spec.compress_tol = f.compress_tol;
  return spec;
}

}  // namespace

void add_make_state(CLI::App& app, GlobalOptions& global, Action& action) {
  auto flags = std::make_shared<StateFlags>();
  CLI::App* sub = app.add_subcommand("make-state", "Build a target state and write it as JSON");
  sub->add_option("--kind", flags->kind,
                  "random-mps | random-mpdo | cluster | ghz | generalized-ghz | phase-ghz | thermal-ising");
  sub->add_option("--n", flags->n, "Number of sites");
  sub->add_option("--chi", flags->chi, "Bond dimension of random states")->capture_default_str();
  sub->add_option("--kappa", flags->kappa, "Kraus dimension of random MPDOs")->capture_default_str();
  sub->add_option("--realness", flags->realness, "real | complex entries of random states")->capture_default_str();
  sub->add_option("--rot-gamma", flags->rot_gamma, "Rotation angle of the generalized GHZ state");
  sub->add_option("--phi1", flags->phi1, "First phase of the phase GHZ state");
  sub->add_option("--phi2", flags->phi2, "Second phase of the phase GHZ state");
  sub->add_option("--field-b", flags->field_b, "Transverse field of the thermal Ising target (default 1)");
  sub->add_option("--temperature", flags->temperature, "Temperature of the thermal Ising target (default 2)");
  sub->add_option("--compress-chi", flags->compress_chi, "Bond cap of the thermal MPO")->capture_default_str();
  sub->add_option("--compress-tol", flags->compress_tol, "Relative singular value cutoff of the thermal MPO")
      ->capture_default_str();
  sub->add_option("--config", flags->config, "JSON StateSpec block");
  sub->callback([&global, &action, flags, sub] {
    action = [&global, flags, sub] {
      apply_config(*flags, *sub);
      Manifest manifest("make-state", global, *sub);
      const BuiltState built = make_state(to_spec(*flags, global.seed));
      manifest.set("state_digest", state_digest(built.state));
      if (built.compression_error > 0.0) {
        manifest.set("compression_error", built.compression_error);
        std::cerr << "thermal target compressed with relative error " << built.compression_error << "\n";
      }
      emit(global, manifest, serialize_state(built.state));
    };
  });
}

void add_sample(CLI::App& app, GlobalOptions& global, Action& action) {
  auto state_path = std::make_shared<std::string>();
  auto count = std::make_shared<std::size_t>(0);
  CLI::App* sub = app.add_subcommand("sample", "Draw SIC-POVM outcome strings from a state");
  sub->add_option("--state", *state_path, "State JSON file")->required();
  sub->add_option("--m", *count, "Number of samples")->required()->check(CLI::PositiveNumber);
  sub->callback([&global, &action, state_path, count, sub] {
    action = [&global, state_path, count, sub] {
      Manifest manifest("sample", global, *sub);
      const State state = load_state_input(*state_path, manifest);
      const ProbabilityMpo prob(state);
      const SampleSet samples = sample(prob, *count, global.seed, global.workers, state_digest(state));
      if (prob.clamp_count() > 0) {
        std::cerr << "warning: " << prob.clamp_count() << " roundoff-negative probabilities clamped to zero\n";
      }
      emit(global, manifest, format_samples(samples));
    };
  });
}

void add_metrics(CLI::App& app, GlobalOptions& global, Action& action) {
  auto paths = std::make_shared<std::vector<std::string>>();
  CLI::App* sub = app.add_subcommand("metrics", "Distance R, purity-normalized D and fidelity of two states");
  sub->add_option("states", *paths, "Model and target state files")->required()->expected(2);
  sub->callback([&global, &action, paths, sub] {
    action = [&global, paths, sub] {
      Manifest manifest("metrics", global, *sub);
      const State a = load_state_input((*paths)[0], manifest);
      const State b = load_state_input((*paths)[1], manifest);
      const Metrics m = compute_metrics(a, b);
      if (global.format(Format::json) == Format::csv) {
        std::string text = "r,d,fidelity\n" + csv_number(m.r) + "," + csv_number(m.d) + ",";
        if (m.fidelity) text += csv_number(*m.fidelity);
        emit(global, manifest, text + "\n");
        return;
      }
      json doc{{"r", m.r}, {"d", m.d}};
      doc["fidelity"] = m.fidelity ? json(*m.fidelity) : json(nullptr);
      emit(global, manifest, doc.dump(2) + "\n");
    };
  });
}

}  // namespace mpstomo::cli
