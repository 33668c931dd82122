#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mpstomo/parameters.hpp"
#include "mpstomo/state.hpp"

namespace mpstomo::cli {

using nlohmann::json;

enum class Format { json, csv };

struct GlobalOptions {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  bool json_flag = false;
  bool csv_flag = false;
  std::vector<std::string> argv;

  Format format(Format fallback) const;
};

/// Run record written next to every output file as <out>.manifest.json.
class Manifest {
 public:
  Manifest(std::string command, const GlobalOptions& global, const CLI::App& sub);
  void add_input(const std::string& path, const std::string& digest);
  void add_seed(const std::string& name, std::uint64_t value);
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }
  json to_json() const;
  void write_sidecar(const std::string& out_path) const;

 private:
  std::string command_;
  std::vector<std::string> argv_;
  json config_;
  json inputs_ = json::array();
  json seeds_ = json::object();
  json extra_ = json::object();
  std::chrono::steady_clock::time_point start_;
};

/// Writes text to the --out file (plus its manifest) or to stdout.
void emit(const GlobalOptions& global, const Manifest& manifest, const std::string& text);

std::string read_file(const std::string& path);
std::string file_digest(const std::string& path);
State load_state_input(const std::string& path, Manifest& manifest);

json matrix_json(const RMatrix& m);
std::string csv_number(double x);

/// --model/--ti/--diagonal/--phase-only flags shared by crb and sweep.
struct ModelFlags {
  std::string realness = "complex";
  bool ti = false;
  bool diagonal = false;
  bool phase_only = false;

  void add_to(CLI::App& app);
  ModelSpec build(const State& anchor) const;
  json to_json() const;
};

using Action = std::function<void()>;

void add_make_state(CLI::App& app, GlobalOptions& global, Action& action);
void add_sample(CLI::App& app, GlobalOptions& global, Action& action);
void add_metrics(CLI::App& app, GlobalOptions& global, Action& action);
void add_crb(CLI::App& app, GlobalOptions& global, Action& action);
void add_ghz_analytic(CLI::App& app, GlobalOptions& global, Action& action);
void add_mle(CLI::App& app, GlobalOptions& global, Action& action);
void add_sweep(CLI::App& app, GlobalOptions& global, Action& action);

}  // namespace mpstomo::cli
