#include <gtest/gtest.h>

#include "mpstomo/error.hpp"
#include "mpstomo/gradient.hpp"
#include "mpstomo/states.hpp"
#include "oracles.hpp"

using namespace mpstomo;
using mpstomo::testing::directional_fd;

namespace {

double log_prob_at(const ModelSpec& spec, const std::vector<ParameterIndex>& table, const RVector& theta,
                   const Outcome& m) {
  return LikelihoodEngine(unpack(table, theta, spec.anchor)).log_prob(m);
}

void expect_matches_fd(const ModelSpec& spec, const Outcome& m) {
  const auto table = parameter_table(spec);
  const RVector theta = pack(table, spec.anchor);
  const RVector g = grad_log_prob(spec, m);
  RVector fd(g.size());
  for (Eigen::Index a = 0; a < g.size(); ++a) {
    fd[a] = directional_fd([&](const RVector& t) { return log_prob_at(spec, table, t, m); }, theta,
                           RVector::Unit(g.size(), a));
  }
  EXPECT_LT((g - fd).norm() / fd.norm(), 1e-6);
}

/// Direction in theta that multiplies every entry of stored site `site` by e^{i eps}.
RVector site_phase_direction(const std::vector<ParameterIndex>& table, const RVector& theta, int site) {
  RVector v = RVector::Zero(theta.size());
  for (std::size_t a = 0; a + 1 < table.size(); ++a) {
    if (table[a].stored_site() != site || table[a].part != Part::real) continue;
    v[a] = -theta[a + 1];
    v[a + 1] = theta[a];
  }
  return v;
}

}  // namespace

TEST(GradLogProb, PureMatchesFiniteDifferences) {
  const ModelSpec spec = make_model(State{random_mps(4, 2, Realness::complex, 3)}, Realness::complex, false);
  for (const char* m : {"0123", "3300", "2121"}) expect_matches_fd(spec, parse_outcome(m));
  const ModelSpec real = make_model(State{random_mps(4, 2, Realness::real, 4)}, Realness::real, false);
  expect_matches_fd(real, parse_outcome("1032"));
}

TEST(GradLogProb, MixedMatchesFiniteDifferences) {
  const ModelSpec spec = make_model(State{random_mpdo(4, 2, 2, Realness::complex, 5)}, Realness::complex, false);
  for (const char* m : {"0123", "2200"}) expect_matches_fd(spec, parse_outcome(m));
}

TEST(GradLogProb, TiModelsMatchFiniteDifferences) {
  const ModelSpec spec = make_model(State{cluster_state(5)}, Realness::complex, true);
  expect_matches_fd(spec, parse_outcome("01231"));
  const ModelSpec ghz = make_model(State{generalized_ghz(6, 0.4)}, Realness::complex, true, true);
  expect_matches_fd(ghz, parse_outcome("001122"));
}

TEST(GradLogProb, TiGradientIsSumOverSites) {
  const int n = 5;
  const ModelSpec ti = make_model(State{cluster_state(n)}, Realness::complex, true);
  const ModelSpec full = make_model(State{cluster_state(n)}, Realness::complex, false);
  const auto per_site = static_cast<Eigen::Index>(parameter_table(ti).size());
  for (const char* m : {"01230", "33333", "10203"}) {
    const RVector gt = grad_log_prob(ti, parse_outcome(m));
    const RVector gf = grad_log_prob(full, parse_outcome(m));
    RVector summed = RVector::Zero(per_site);
    for (int i = 0; i < n; ++i) summed += gf.segment(i * per_site, per_site);
    EXPECT_LT((gt - summed).norm(), 1e-10 * std::max(1.0, gt.norm()));
  }
}

TEST(GradLogProb, GlobalPhaseDirectionIsFlat) {
  const ModelSpec phase = make_model(State{phase_ghz(6, 0.2, 1.3)}, Realness::complex, true, false, true);
  for (const char* m : {"000000", "012301", "333210"}) {
    const RVector g = grad_log_prob(phase, parse_outcome(m));
    EXPECT_NEAR(g[0] + g[1], 0.0, 1e-12);
  }
  const ModelSpec spec = make_model(State{random_mps(4, 2, Realness::complex, 8)}, Realness::complex, false);
  const auto table = parameter_table(spec);
  const RVector v = site_phase_direction(table, pack(table, spec.anchor), 2);
  for (const char* m : {"0123", "3210"}) EXPECT_NEAR(grad_log_prob(spec, parse_outcome(m)).dot(v), 0.0, 1e-10);
}

TEST(LogZ, GradientMatchesFiniteDifferences) {
  const ModelSpec spec = make_model(State{random_mpdo(4, 2, 2, Realness::complex, 6)}, Realness::complex, false);
  const auto table = parameter_table(spec);
  const RVector theta = pack(table, spec.anchor);
  TensorGrad g = zero_grad(spec.anchor);
  LikelihoodEngine(spec.anchor).log_z(1.0, &g);
  const RVector analytic = project(table, parameter_directions(table, spec.anchor), g);
  RVector fd(analytic.size());
  for (Eigen::Index a = 0; a < fd.size(); ++a) {
    fd[a] = directional_fd([&](const RVector& t) { return LikelihoodEngine(unpack(table, t, spec.anchor)).log_z(); },
                           theta, RVector::Unit(fd.size(), a));
  }
  EXPECT_LT((analytic - fd).norm() / fd.norm(), 1e-6);
}

TEST(LogProb, ZeroProbabilityIsIntegrityError) {
  // <phi_1|1> = 0, so every outcome containing 0 has P = 0 on |11>.
  SiteTensor t(2, 1, 1);
  t[1](0, 0) = 1.0;
  const LikelihoodEngine engine(Mpdo::from_mps(Mps({t, t})));
  EXPECT_THROW(engine.log_prob(parse_outcome("01")), IntegrityError);
  EXPECT_NO_THROW(engine.log_prob(parse_outcome("12")));
}
