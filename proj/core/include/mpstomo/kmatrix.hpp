#pragma once

#include <array>
#include <string>

#include "mpstomo/parameters.hpp"

namespace mpstomo {

struct KMatrix {
  RMatrix values;
  std::string provenance = "contraction";
};

/// Derivative of the MPO site tensor with respect to one parameter:
/// D^{ss'} = c delta_{s,s_a} E_j (x) conj(C_k^{s'}) + conj(c) delta_{s',s_a} C_k^s (x) E_j
/// with c = dz/dtheta, plus its SIC combinations G^m.
struct DerivativeInsertion {
  SiteTensor d;
  std::array<CMatrix, 4> g;
};

DerivativeInsertion derivative_insertion(const ModelSpec& spec, int parameter, int position);

/// K_ab = sum_k d rho_k/d theta_a conj(d rho_k/d theta_b) / Tr(rho)^2 at the
/// anchor, by transfer contraction with cached environments.
KMatrix k_matrix(const ModelSpec& spec);

/// Raw Wirtinger blocks over every stored entry e = (stored site, slice, row,
/// col) in storage order: S(e, f) = Tr(X_f^dagger X_e), T(e, f) = Tr(X_e X_f),
/// X_e = d rho / d z_e, for rho rescaled to unit trace. Exposed for tests.
struct WirtingerBlocks {
  CMatrix s;
  CMatrix t;
  /// The anchor was multiplied by this factor before contraction.
  double rescale = 1.0;
};

WirtingerBlocks wirtinger_blocks(const Mpdo& anchor);

/// Global entry id used by WirtingerBlocks.
int entry_id(const Mpdo& anchor, int stored_site, int slice, int row, int col);

}  // namespace mpstomo
