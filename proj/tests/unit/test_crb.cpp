#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mpstomo/crb.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/fisher.hpp"
#include "mpstomo/kmatrix.hpp"
#include "mpstomo/states.hpp"

using namespace mpstomo;

namespace {

double exact_bound(const ModelSpec& spec) {
  const RMatrix k = k_matrix(spec).values;
  const bool diagonal = spec.ti && (spec.diagonal_only || spec.phase_only);
  return crb_trace(k, diagonal ? fisher_exact_diagonal_ti(spec).values : fisher_exact(spec).values).tr_ki;
}

}  // namespace

TEST(CrbTrace, GhzRealTiApproachesSevenHalves) {
  for (int n : {8, 12, 20, 40}) {
    const ModelSpec spec = make_model(State{ghz_state(n)}, Realness::real, true, true);
    EXPECT_NEAR(exact_bound(spec), 3.5, 0.01 * 3.5) << "n=" << n;
  }
}

TEST(CrbTrace, GhzRealNonTiIsTwoNPlusThreeHalves) {
  for (int n : {5, 6}) {
    const ModelSpec spec = make_model(State{ghz_state(n)}, Realness::real, false, true);
    EXPECT_NEAR(exact_bound(spec), 2.0 * n + 1.5, 0.01 * (2.0 * n + 1.5)) << "n=" << n;
  }
}

TEST(CrbTrace, PhaseModelIsInverseTwoDelta) {
  for (int n : {6, 10, 16}) {
    const ModelSpec spec = make_model(State{phase_ghz(n, 0.5, -0.2)}, Realness::complex, true, false, true);
    const RMatrix f = fisher_exact_diagonal_ti(spec).values;
    const double delta = f(0, 0) / (n * n);
    EXPECT_NEAR(exact_bound(spec), 1.0 / (2.0 * delta), 1e-8 / delta);
  }
  EXPECT_NEAR(exact_bound(make_model(State{phase_ghz(16, 0.5, -0.2)}, Realness::complex, true, false, true)),
              std::pow(2.0, 15), 0.02 * std::pow(2.0, 15));
}

TEST(CrbTrace, GhzComplexApproachesTwoToNMinusOne) {
  for (int n = 10; n <= 20; n += 2) {
    const ModelSpec spec = make_model(State{ghz_state(n)}, Realness::complex, true, true);
    const double expected = std::pow(2.0, n - 1);
    EXPECT_NEAR(exact_bound(spec), expected, 0.02 * expected) << "n=" << n;
  }
}

TEST(CrbTrace, GaugeMismatchIsRejected) {
  RMatrix k(2, 2);
  k << 1.0, 0.0, 0.0, 1.0;
  RMatrix f(2, 2);
  f << 1.0, 0.0, 0.0, 0.0;
  EXPECT_THROW(crb_trace(k, f), GaugeMismatchError);
  k(1, 1) = 0.0;
  const CrbResult ok = crb_trace(k, f);
  EXPECT_DOUBLE_EQ(ok.tr_ki, 1.0);
  EXPECT_EQ(ok.discarded_dim, 1);
}

TEST(CrbTrace, GaugeDirectionsOfRandomMpsAreDropped) {
  const ModelSpec spec = make_model(State{random_mps(4, 2, Realness::complex, 31)}, Realness::complex, false);
  const CrbResult r = crb_trace(k_matrix(spec).values, fisher_exact(spec).values);
  EXPECT_GT(r.discarded_dim, 0);
  EXPECT_LT(r.max_leak, kDefaultLeakTol);
  EXPECT_GT(r.tr_ki, 0.0);
}

TEST(CrbTrace, DimensionMismatch) {
  EXPECT_THROW(crb_trace(RMatrix::Identity(2, 2), RMatrix::Identity(3, 3)), ArgumentError);
}

TEST(CrbTrace, ComplexModelNeverBelowReal) {
  for (std::uint64_t seed = 40; seed < 44; ++seed) {
    const State target{random_mps(5, 2, Realness::real, seed)};
    const double real = exact_bound(make_model(target, Realness::real, false));
    const double complex = exact_bound(make_model(target, Realness::complex, false));
    EXPECT_GE(complex, real * (1.0 - 1e-9)) << "seed " << seed;
  }
}

TEST(CrbTrace, OffDiagonalParametersDoNotChangeGhzBound) {
  for (int n = 4; n <= 6; ++n) {
    for (Realness r : {Realness::real, Realness::complex}) {
      const State target{ghz_state(n)};
      const double diagonal = exact_bound(make_model(target, r, true, true));
      const double full = exact_bound(make_model(target, r, true, false));
      EXPECT_NEAR(full / diagonal, 1.0, 0.01) << "n=" << n << " " << to_string(r);
    }
  }
}

TEST(InfidelityBound, Examples) {
  EXPECT_DOUBLE_EQ(infidelity_bound(4.0, 1000.0), 0.002);
  EXPECT_NEAR(infidelity_bound(3.5, 7000.0), 2.5e-4, 1e-18);
  EXPECT_THROW(infidelity_bound(1.0, 0.5), ArgumentError);
}

TEST(GhzAnalytic, CoefficientsApproachAsymptotes) {
  const GhzCoefficients c = ghz_coefficients(16);
  EXPECT_NEAR(c.gamma, 2.0, 0.02);
  EXPECT_NEAR(c.delta * std::pow(2.0, 16), 1.0, 0.01);
}

TEST(GhzAnalytic, TiComplexBoundAtEight) {
  const GhzAnalytic a = ghz_analytic_ki(8, true, Realness::complex);
  EXPECT_EQ(a.k.provenance, "analytic");
  EXPECT_EQ(a.fisher.provenance, "analytic");
  EXPECT_NEAR(crb_trace(a.k.values, a.fisher.values).tr_ki, 128.0, 0.02 * 128.0);
}

TEST(GhzAnalytic, RealFormsReproduceBounds) {
  EXPECT_NEAR(crb_trace(ghz_analytic_ki(10, true, Realness::real).k.values,
                        ghz_analytic_ki(10, true, Realness::real).fisher.values)
                  .tr_ki,
              3.5, 0.035);
  const GhzAnalytic nonti = ghz_analytic_ki(5, false, Realness::real);
  EXPECT_NEAR(crb_trace(nonti.k.values, nonti.fisher.values).tr_ki, 11.5, 0.115);
  EXPECT_THROW(ghz_analytic_ki(2, true, Realness::real), ArgumentError);
}

TEST(GhzAnalytic, NonTiRealKBlocks) {
  const int n = 5;
  const RMatrix k = ghz_analytic_ki(n, false, Realness::real).k.values;
  // Parameter (site, a) sits at site * 4 + a.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double same = i == j ? 1.0 : 0.0;
      EXPECT_DOUBLE_EQ(k(i * 4, j * 4), 1.5);
      EXPECT_DOUBLE_EQ(k(i * 4 + 3, j * 4 + 3), 1.5);
      EXPECT_DOUBLE_EQ(k(i * 4, j * 4 + 3), 0.5);
      EXPECT_DOUBLE_EQ(k(i * 4 + 1, j * 4 + 1), same);
    }
  }
}

TEST(ZetaFit, GhzAndReflection) {
  std::vector<int> ns;
  for (int n = 12; n <= 24; n += 4) ns.push_back(n);
  const ZetaFit ghz = zeta_fit(0.0, ns);
  EXPECT_NEAR(ghz.zeta, 2.0, 0.05);
  EXPECT_EQ(ghz.bounds.size(), ns.size());
  // rotation(pi/2) maps the even-N GHZ state to itself, so gamma and gamma - pi/2 coincide.
  const double g = 0.4;
  EXPECT_NEAR(zeta_fit(g, ns).zeta, zeta_fit(g - std::numbers::pi / 2, ns).zeta, 1e-6);
  EXPECT_NEAR(zeta_fit(std::numbers::pi / 3, ns).zeta, 1.24, 0.05);
}

TEST(GeneralizedGhz, BoundMatchesGhzAtZeroAngle) {
  const double direct = exact_bound(make_model(State{ghz_state(10)}, Realness::complex, true, true));
  EXPECT_NEAR(generalized_ghz_bound(10, 0.0), direct, 1e-8 * direct);
}
