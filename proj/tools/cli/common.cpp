#include "common.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "mpstomo/error.hpp"

namespace mpstomo::cli {

Format GlobalOptions::format(Format fallback) const {
  if (json_flag) return Format::json;
  if (csv_flag) return Format::csv;
  return fallback;
}

Manifest::Manifest(std::string command, const GlobalOptions& global, const CLI::App& sub)
    : command_(std::move(command)), argv_(global.argv), start_(std::chrono::steady_clock::now()) {
  config_ = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const std::string key = opt->get_single_name();
    if (opt->count() > 0) {
      const auto& results = opt->results();
      config_[key] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (!opt->get_default_str().empty()) {
      config_[key] = opt->get_default_str();
    }
  }
  config_["seed"] = global.seed;
  config_["workers"] = global.workers;
  add_seed("seed", global.seed);
}

void Manifest::add_input(const std::string& path, const std::string& digest) {
  inputs_.push_back({{"path", path}, {"digest", digest}});
}

void Manifest::add_seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }

json Manifest::to_json() const {
  json doc;
  doc["command"] = command_;
  doc["argv"] = argv_;
  doc["config"] = config_;
  doc["seeds"] = seeds_;
  doc["inputs"] = inputs_;
  doc["tool_version"] = MPSTOMO_VERSION;
  doc["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  for (const auto& [k, v] : extra_.items()) doc[k] = v;
  return doc;
}

void Manifest::write_sidecar(const std::string& out_path) const {
  std::ofstream out(out_path + ".manifest.json", std::ios::binary);
  if (!out) throw ArgumentError("cannot write manifest for '" + out_path + "'");
  out << to_json().dump(2) << "\n";
}

void emit(const GlobalOptions& global, const Manifest& manifest, const std::string& text) {
  if (global.out.empty() || global.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  {
    std::ofstream out(global.out, std::ios::binary);
    if (!out) throw ArgumentError("cannot write output file '" + global.out + "'");
    out << text;
  }
  manifest.write_sidecar(global.out);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string file_digest(const std::string& path) { return fnv1a_hex(read_file(path)); }

State load_state_input(const std::string& path, Manifest& manifest) {
  State s = parse_state(read_file(path));
  manifest.add_input(path, state_digest(s));
  return s;
}

json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_number(double x) { return json(x).dump(); }

void ModelFlags::add_to(CLI::App& app) {
  app.add_option("--model", realness, "Model realness")->check(CLI::IsMember({"real", "complex"}))->capture_default_str();
  app.add_flag("--ti", ti, "Translation-invariant model");
  app.add_flag("--diagonal", diagonal, "Keep only diagonal matrix elements");
  app.add_flag("--phase-only", phase_only, "One phase per nonzero anchor entry");
}

ModelSpec ModelFlags::build(const State& anchor) const {
  return make_model(anchor, parse_realness(realness), ti, diagonal, phase_only);
}

json ModelFlags::to_json() const {
  return {{"realness", realness}, {"ti", ti}, {"diagonal_only", diagonal}, {"phase_only", phase_only}};
}

}  // namespace mpstomo::cli
