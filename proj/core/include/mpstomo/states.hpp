#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mpstomo/state.hpp"
#include "mpstomo/tensor.hpp"

namespace mpstomo {

enum class Realness { real, complex };

Realness parse_realness(const std::string& name);
std::string to_string(Realness r);

/// Entries of every site drawn i.i.d. uniform on [-1, 1) (imaginary parts
/// likewise when complex). Periodic chi x chi bonds, drawn in stored order
/// (site, phys, row, column, re, im).
Mps random_mps(int n, int chi, Realness realness, std::uint64_t seed);
Mpdo random_mpdo(int n, int chi, int kappa, Realness realness, std::uint64_t seed);

/// C^0 = [[0,0],[1,1]], C^1 = [[1,-1],[0,0]].
Mps cluster_state(int n);
/// C^0 = diag(1, 0), C^1 = diag(0, 1).
Mps ghz_state(int n);
/// C^0 = diag(cos g, sin g), C^1 = diag(-sin g, cos g); equals rotation(-g)^{(x)N} |GHZ>.
Mps generalized_ghz(int n, double rot_gamma);
/// C^0 = diag(e^{i phi1}, 0), C^1 = diag(0, e^{i phi2}).
Mps phase_ghz(int n, double phi1, double phi2);

inline constexpr int kThermalMinSites = 2;
inline constexpr int kThermalMaxSites = 10;

/// H = sum_j sz_j sz_{j+1} (open chain) + B sum_j sx_j, rho = exp(-H/T) / Tr.
CMatrix ising_hamiltonian_dense(int n, double field_b);
CMatrix thermal_ising_dense(int n, double field_b, double temperature);

/// Single-qubit SO(2) rotation [[cos g, -sin g], [sin g, cos g]].
CMatrix rotation(double rot_gamma);

enum class StateKind { random_mps, random_mpdo, cluster, ghz, generalized_ghz, phase_ghz, thermal_ising };

StateKind parse_state_kind(const std::string& name);
std::string to_string(StateKind kind);

struct StateSpec {
  StateKind kind = StateKind::ghz;
  int n_sites = 0;
  int chi = 2;
  int kappa = 1;
  Realness realness = Realness::real;
  std::optional<double> rot_gamma;
  std::optional<double> phi1;
  std::optional<double> phi2;
  std::optional<double> field_b;
  std::optional<double> temperature;
  std::uint64_t seed = 0;
  /// Compression of dense thermal targets.
  int compress_chi_max = 64;
  double compress_tol = 1e-10;
};

/// Throws ArgumentError when a parameter is supplied to a kind that does not
/// use it, or a required one is missing.
void validate(const StateSpec& spec);

struct BuiltState {
  State state;
  /// Relative Frobenius error of the MPO compression (thermal targets only).
  double compression_error = 0.0;
};

BuiltState make_state(const StateSpec& spec);

}  // namespace mpstomo
