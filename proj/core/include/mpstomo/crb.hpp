#pragma once

#include <vector>

#include "mpstomo/fisher.hpp"
#include "mpstomo/kmatrix.hpp"

namespace mpstomo {

struct CrbResult {
  double tr_ki = 0.0;
  /// Number of eigen-directions of I dropped by the cutoff.
  int discarded_dim = 0;
  /// Largest ||K u|| / ||K|| over the dropped unit directions u.
  double max_leak = 0.0;
};

inline constexpr double kDefaultCutoff = 1e-12;
inline constexpr double kDefaultLeakTol = 1e-6;

/// Tr(K I^+). I is first scaled to unit diagonal, D I D with D = diag(I)^-1/2,
/// so parameters of very different magnitude do not compete inside the
/// cutoff; eigenvalues of D I D below cutoff * max are dropped. Throws
/// GaugeMismatchError if K acts on a dropped direction above leak_tol * ||K||.
CrbResult crb_trace(const RMatrix& k, const RMatrix& fisher, double cutoff = kDefaultCutoff,
                    double leak_tol = kDefaultLeakTol);

/// Expected infidelity floor tr_ki / (2M).
double infidelity_bound(double tr_ki, double samples);

/// GHZ coefficients: gamma = I(Re a1, Re a1) / N^2 and delta = I(Re a1, Re a4) / N^2
/// of the complex diagonal TI model, from the exact multinomial sum.
struct GhzCoefficients {
  double gamma = 0.0;
  double delta = 0.0;
};
GhzCoefficients ghz_coefficients(int n);

struct GhzAnalytic {
  KMatrix k;
  FisherMatrix fisher;
  GhzCoefficients coefficients;
};

/// Closed-form normalized K and block-form I of the GHZ state for the
/// diagonal model (TI or not, real or complex), in canonical parameter order.
GhzAnalytic ghz_analytic_ki(int n, bool ti, Realness realness);

/// Tr(K I^+) of the generalized GHZ state for the complex diagonal TI model.
double generalized_ghz_bound(int n, double rot_gamma);

struct ZetaFit {
  double zeta = 0.0;
  std::vector<int> n_values;
  std::vector<double> bounds;
};

/// Least-squares slope of log Tr(K I^+) against N; zeta = exp(slope).
ZetaFit zeta_fit(double rot_gamma, const std::vector<int>& n_values);

}  // namespace mpstomo
