#include <iostream>
#include <string>
#include <vector>

#include "common.hpp"
#include "mpstomo/error.hpp"

namespace {

using namespace mpstomo;
using namespace mpstomo::cli;

int run(std::vector<std::string> args);

void add_replay(CLI::App& app, Action& action, int& replay_status) {
  auto path = std::make_shared<std::string>();
  CLI::App* sub = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  sub->add_option("manifest", *path, "Manifest file")->required();
  sub->callback([&action, &replay_status, path] {
    action = [&replay_status, path] {
      json doc;
      try {
        doc = json::parse(read_file(*path));
      } catch (const json::exception& e) {
        throw ArgumentError(std::string("manifest is not valid JSON: ") + e.what());
      }
      if (!doc.contains("argv") || !doc["argv"].is_array()) throw ArgumentError("manifest has no argv");
      replay_status = run(doc["argv"].get<std::vector<std::string>>());
    };
  });
}

int run(std::vector<std::string> args) {
  CLI::App app{"Tomography of matrix product states under local SIC-POVM measurements", "mpstomo"};
  app.set_version_flag("--version", MPSTOMO_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions global;
  global.argv = args;
  app.add_option("--seed", global.seed, "Master random seed")->capture_default_str();
  app.add_option("--workers", global.workers, "Worker threads (0 = all cores); never changes results")
      ->capture_default_str();
  app.add_option("--out", global.out, "Output file; a manifest is written next to it");
  auto* json_flag = app.add_flag("--json", global.json_flag, "JSON output");
  app.add_flag("--csv", global.csv_flag, "CSV output")->excludes(json_flag);

  Action action;
  int replay_status = 0;
  add_make_state(app, global, action);
  add_sample(app, global, action);
  add_crb(app, global, action);
  add_mle(app, global, action);
  add_metrics(app, global, action);
  add_ghz_analytic(app, global, action);
  add_sweep(app, global, action);
  add_replay(app, action, replay_status);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (global.workers < 0) {
    std::cerr << "error: --workers must be non-negative\n";
    return 2;
  }
  try {
    action();
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const GuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const OptimizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return replay_status;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
