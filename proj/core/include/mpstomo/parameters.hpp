#pragma once

#include <string>
#include <vector>

#include "mpstomo/rng.hpp"
#include "mpstomo/state.hpp"
#include "mpstomo/states.hpp"
#include "mpstomo/tensor.hpp"

namespace mpstomo {

/// real / imag: the two parts of a matrix element. phase: theta with
/// z = |z_0| e^{i theta}, used by the two-parameter phase models.
enum class Part { real, imag, phase };

/// One real parameter theta_alpha = (site, j, k, s, part). site is
/// kSharedSite for translation-invariant models; j = row * right_dim + col.
struct ParameterIndex {
  static constexpr int kSharedSite = -1;
  int site = 0;
  int j = 0;
  int k = 0;
  int s = 0;
  Part part = Part::real;
  int row = 0;
  int col = 0;

  /// Index of the stored site tensor this parameter lives in.
  int stored_site() const { return site == kSharedSite ? 0 : site; }
  /// Slice index in the stored tensor, k * 2 + s.
  int slice() const { return k * 2 + s; }
  bool operator==(const ParameterIndex&) const = default;
};

/// Model class plus the anchor theta_0 at which derivatives are evaluated.
/// The anchor is always held as an MPDO (kappa = 1 for pure models) with one
/// stored tensor when ti is set.
struct ModelSpec {
  Realness realness = Realness::complex;
  bool ti = false;
  bool diagonal_only = false;
  bool phase_only = false;
  Mpdo anchor;

  int n_sites() const { return anchor.n_sites(); }
  int chi() const { return anchor.chi(); }
  int kappa() const { return anchor.kappa(); }
  bool pure() const { return anchor.kappa() == 1; }
};

/// Builds a model around a target. A translation-invariant target is expanded
/// to N independent copies for a non-TI model; a TI model needs a TI target.
/// diagonal_only keeps only diagonal matrix elements; phase_only keeps one
/// phase per nonzero anchor entry.
ModelSpec make_model(const State& anchor, Realness realness, bool ti, bool diagonal_only = false,
                     bool phase_only = false);

/// Same model class, new anchor (shape must match).
ModelSpec with_anchor(const ModelSpec& spec, Mpdo anchor);

/// Canonical order: site, then k, s, j, part.
std::vector<ParameterIndex> parameter_table(const ModelSpec& spec);

/// theta values read off a state of the model's shape.
RVector pack(const std::vector<ParameterIndex>& table, const Mpdo& state);
/// Writes theta into a copy of base; entries outside the table keep base values.
Mpdo unpack(const std::vector<ParameterIndex>& table, const RVector& theta, const Mpdo& base);

/// dz/dtheta for each parameter at the given state: 1, i, or i z.
CVector parameter_directions(const std::vector<ParameterIndex>& table, const Mpdo& state);

/// Complex Wirtinger derivatives df/dz, one per stored tensor entry.
using TensorGrad = std::vector<SiteTensor>;

TensorGrad zero_grad(const Mpdo& state);

/// df/dtheta_alpha = 2 Re(c_alpha df/dz) for real f.
RVector project(const std::vector<ParameterIndex>& table, const CVector& directions, const TensorGrad& grad);

/// Random model of the given class: every stored entry uniform in
/// [-scale, scale) (imaginary parts likewise when complex); diagonal_only
/// zeros the off-diagonal entries.
Mpdo random_model(int n_sites, int chi, int kappa, bool ti, Realness realness, bool diagonal_only,
                  double scale, Rng& rng);

/// A TI chain written out as N stored copies.
Mpdo expand_ti(const Mpdo& m);

}  // namespace mpstomo
