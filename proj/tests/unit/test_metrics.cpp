#include <gtest/gtest.h>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/metrics.hpp"
#include "mpstomo/states.hpp"
#include "oracles.hpp"

using namespace mpstomo;

namespace {

Mps product_state(const std::vector<CVector>& qubits) {
  std::vector<SiteTensor> sites;
  for (const auto& q : qubits) {
    SiteTensor t(2, 1, 1);
    t[0](0, 0) = q[0];
    t[1](0, 0) = q[1];
    sites.push_back(std::move(t));
  }
  return Mps(std::move(sites));
}

}  // namespace

TEST(Metrics, IdenticalStates) {
  const State a{random_mps(6, 2, Realness::complex, 51)};
  const Metrics m = compute_metrics(a, a);
  EXPECT_NEAR(m.r, 0.0, 1e-12);
  EXPECT_NEAR(m.d, 0.0, 1e-12);
  ASSERT_TRUE(m.fidelity.has_value());
  EXPECT_NEAR(*m.fidelity, 1.0, 1e-12);
}

TEST(Metrics, OrthogonalPureStates) {
  CVector zero(2), one(2);
  zero << 1.0, 0.0;
  one << 0.0, 1.0;
  const State a{product_state({zero, zero, zero})};
  const State b{product_state({zero, one, zero})};
  EXPECT_NEAR(fidelity_pure(a, b), 0.0, 1e-15);
  EXPECT_NEAR(distance_r(a, b), 2.0, 1e-12);
}

TEST(Metrics, DenseOracleForMpdoPair) {
  const State a{random_mpdo(4, 2, 2, Realness::complex, 52)};
  const State b{random_mpdo(4, 2, 2, Realness::complex, 53)};
  CMatrix ra = mpstomo::testing::dense_rho(a);
  CMatrix rb = mpstomo::testing::dense_rho(b);
  ra /= ra.trace();
  rb /= rb.trace();
  const CMatrix diff = ra - rb;
  const double r = (diff * diff).trace().real();
  EXPECT_NEAR(distance_r(a, b) / r, 1.0, 1e-10);
  EXPECT_NEAR(distance_d(a, b) / (r / (rb * rb).trace().real()), 1.0, 1e-10);
  EXPECT_FALSE(compute_metrics(a, b).fidelity.has_value());
}

TEST(Metrics, PureStateIdentity) {
  for (int n = 2; n <= 8; ++n) {
    const State a{random_mps(n, 2, Realness::complex, 60 + n)};
    const State b{random_mps(n, 2, Realness::complex, 70 + n)};
    const double f = fidelity_pure(a, b);
    EXPECT_NEAR(distance_r(a, b), 2.0 * (1.0 - f), 1e-10) << "n=" << n;
  }
}

TEST(Metrics, OpenBoundaryTargetAgainstPeriodicModel) {
  StateSpec spec;
  spec.kind = StateKind::thermal_ising;
  spec.n_sites = 5;
  spec.field_b = 1.0;
  spec.temperature = 2.0;
  const State target = make_state(spec).state;
  const State model{random_mpdo(5, 3, 2, Realness::complex, 54)};
  CMatrix rt = mpstomo::testing::dense_rho(target);
  CMatrix rm = mpstomo::testing::dense_rho(model);
  rt /= rt.trace();
  rm /= rm.trace();
  const CMatrix diff = rm - rt;
  const double r = (diff * diff).trace().real();
  EXPECT_NEAR(distance_r(model, target) / r, 1.0, 1e-10);
  EXPECT_NEAR(distance_d(model, target) * (rt * rt).trace().real() / r, 1.0, 1e-10);
}

TEST(Metrics, Errors) {
  SiteTensor zero_site(2, 1, 1);
  const State zero{Mps(std::vector<SiteTensor>(3, zero_site))};
  const State a{random_mps(3, 2, Realness::real, 55)};
  EXPECT_THROW(distance_r(zero, a), IntegrityError);
  EXPECT_THROW(fidelity_pure(a, zero), IntegrityError);
  EXPECT_THROW(distance_r(a, State{random_mps(4, 2, Realness::real, 56)}), ArgumentError);
  EXPECT_THROW(fidelity_pure(a, State{random_mpdo(3, 2, 2, Realness::real, 57)}), ArgumentError);
}
