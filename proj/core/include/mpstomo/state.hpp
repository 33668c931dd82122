#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "mpstomo/tensor.hpp"

namespace mpstomo {

/// Any quantum state the pipeline can carry around.
using State = std::variant<Mps, Mpdo, Mpo>;

int n_sites(const State& state);
bool is_pure(const State& state);
Mpo to_mpo(const State& state);

/// Serialized state document (format_version 1). Entries of every site are
/// listed per physical index in (left, right) row-major order as [re, im].
std::string serialize_state(const State& state);
State parse_state(const std::string& text);

State load_state(const std::string& path);
void save_state(const State& state, const std::string& path);

/// FNV-1a 64-bit hash of the serialized document, as 16 hex digits.
std::string state_digest(const State& state);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace mpstomo
