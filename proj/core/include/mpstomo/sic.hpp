#pragma once

#include <array>

#include "mpstomo/tensor.hpp"

namespace mpstomo {

/// Single-qubit SIC-POVM. Outcome m = 0..3 corresponds to |phi_{m+1}>.
struct SicEffects {
  /// phi[m](s): amplitude of |s> in |phi_{m+1}>.
  std::array<CVector, 4> phi;
  /// M_m = |phi_m><phi_m|.
  std::array<CMatrix, 4> effects;
  /// Qubit-to-ququart mapping unitary; row m starts with conj(phi_m).
  CMatrix u_sic;
  /// weight[m](s, s') = conj(phi_m(s)) phi_m(s'), so P(m) = sum_{ss'} weight(s, s') rho_{ss'}.
  std::array<CMatrix, 4> weight;
};

const SicEffects& sic_effects();

/// The standard effects with every |phi_m> replaced by u^dagger |phi_m>, so
/// measuring a state rho with them equals measuring u rho u^dagger with the
/// standard effects.
SicEffects rotated_sic_effects(const CMatrix& u);

/// P(m) for a single-qubit density matrix.
std::array<double, 4> single_qubit_probabilities(const CMatrix& rho, const SicEffects& sic = sic_effects());

}  // namespace mpstomo
