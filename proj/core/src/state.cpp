#include "mpstomo/state.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"

namespace mpstomo {

using nlohmann::json;

int n_sites(const State& state) {
  return std::visit([](const auto& s) { return s.n_sites(); }, state);
}

bool is_pure(const State& state) {
  if (std::holds_alternative<Mps>(state)) return true;
  if (const auto* m = std::get_if<Mpdo>(&state)) return m->kappa() == 1;
  return false;
}

Mpo to_mpo(const State& state) {
  if (const auto* m = std::get_if<Mps>(&state)) return mpo_from_mps(*m);
  if (const auto* m = std::get_if<Mpdo>(&state)) return mpo_from_mpdo(*m);
  return std::get<Mpo>(state);
}

namespace {

constexpr int kFormatVersion = 1;

json site_to_json(const SiteTensor& t) {
  json phys = json::array();
  for (int p = 0; p < t.phys_dim(); ++p) {
    json entries = json::array();
    for (int a = 0; a < t.left_dim(); ++a) {
      for (int b = 0; b < t.right_dim(); ++b) {
        const cplx z = t[p](a, b);
        entries.push_back(json::array({z.real(), z.imag()}));
      }
    }
    phys.push_back(std::move(entries));
  }
  return phys;
}

SiteTensor site_from_json(const json& j, int phys_dim, int left, int right) {
  if (!j.is_array() || static_cast<int>(j.size()) != phys_dim) {
    throw ArgumentError("state file: wrong number of physical slices");
  }
  SiteTensor t(phys_dim, left, right);
  for (int p = 0; p < phys_dim; ++p) {
    const json& entries = j[p];
    if (!entries.is_array() || static_cast<int>(entries.size()) != left * right) {
      throw ArgumentError("state file: slice has wrong entry count");
    }
    for (int a = 0; a < left; ++a) {
      for (int b = 0; b < right; ++b) {
        const json& z = entries[a * right + b];
        if (!z.is_array() || z.size() != 2) throw ArgumentError("state file: entry must be [re, im]");
        t[p](a, b) = cplx(z[0].get<double>(), z[1].get<double>());
      }
    }
  }
  if (!t.all_finite()) throw ArgumentError("state file: non-finite entry");
  return t;
}

json chain_to_json(const std::vector<SiteTensor>& stored) {
  json bonds = json::array();
  for (const auto& s : stored) bonds.push_back(s.left_dim());
  bonds.push_back(stored.back().right_dim());
  return bonds;
}

}  // namespace

std::string serialize_state(const State& state) {
  json doc;
  doc["format_version"] = kFormatVersion;
  const std::vector<SiteTensor>* stored = nullptr;
  std::vector<SiteTensor> mpo_sites;
  if (const auto* m = std::get_if<Mps>(&state)) {
    doc["kind"] = "mps";
    doc["n_sites"] = m->n_sites();
    doc["chi"] = m->chi();
    doc["kappa"] = 1;
    doc["ti"] = m->translationally_invariant();
    stored = &m->stored_sites();
  } else if (const auto* m = std::get_if<Mpdo>(&state)) {
    doc["kind"] = "mpdo";
    doc["n_sites"] = m->n_sites();
    doc["chi"] = m->chi();
    doc["kappa"] = m->kappa();
    doc["ti"] = m->translationally_invariant();
    stored = &m->stored_sites();
  } else {
    const auto& o = std::get<Mpo>(state);
    doc["kind"] = "mpo";
    doc["n_sites"] = o.n_sites();
    doc["chi"] = o.max_bond();
    doc["kappa"] = 0;
    doc["ti"] = false;
    stored = &o.sites();
  }
  doc["bond_dims"] = chain_to_json(*stored);
  json sites = json::array();
  for (const auto& s : *stored) sites.push_back(site_to_json(s));
  doc["sites"] = std::move(sites);
  return doc.dump() + "\n";
}

State parse_state(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("state file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw ArgumentError("unsupported state format_version");
    }
    const std::string kind = doc.at("kind").get<std::string>();
    const int n = doc.at("n_sites").get<int>();
    const bool ti = doc.at("ti").get<bool>();
    const auto bonds = doc.at("bond_dims").get<std::vector<int>>();
    const json& sites_json = doc.at("sites");
    const int stored = ti ? 1 : n;
    if (n < 1 || static_cast<int>(sites_json.size()) != stored ||
        static_cast<int>(bonds.size()) != stored + 1) {
      throw ArgumentError("state file: inconsistent site count");
    }
    int phys = 2;
    int kappa = 1;
    if (kind == "mpdo") {
      kappa = doc.at("kappa").get<int>();
      if (kappa < 1) throw ArgumentError("state file: kappa must be positive");
      phys = 2 * kappa;
    } else if (kind == "mpo") {
      phys = 4;
      if (ti) throw ArgumentError("state file: MPO documents are never translation invariant");
    } else if (kind != "mps") {
      throw ArgumentError("state file: unknown kind '" + kind + "'");
    }
    std::vector<SiteTensor> sites;
    for (int i = 0; i < stored; ++i) {
      sites.push_back(site_from_json(sites_json[i], phys, bonds[i], bonds[i + 1]));
    }
    if (kind == "mps") {
      return ti ? State{Mps::translation_invariant(sites[0], n)} : State{Mps(std::move(sites))};
    }
    if (kind == "mpdo") {
      return ti ? State{Mpdo::translation_invariant(sites[0], kappa, n)}
                : State{Mpdo(std::move(sites), kappa)};
    }
    return State{Mpo(std::move(sites))};
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("state file: ") + e.what());
  }
}

State load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open state file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_state(buf.str());
}

void save_state(const State& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write state file '" + path + "'");
  out << serialize_state(state);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string state_digest(const State& state) { return fnv1a_hex(serialize_state(state)); }

}  // namespace mpstomo
