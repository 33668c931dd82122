#include <cmath>

#include <gtest/gtest.h>

#include "mpstomo/error.hpp"
#include "mpstomo/mle.hpp"
#include "mpstomo/states.hpp"
#include "oracles.hpp"

using namespace mpstomo;

namespace {

SampleSet draw(const State& s, std::size_t m, std::uint64_t seed) { return sample(ProbabilityMpo(s), m, seed); }

OutcomeHistogram exact_histogram(const State& s) {
  const auto w = mpstomo::testing::enumerate_outcomes(s);
  OutcomeHistogram h;
  h.n_sites = n_sites(s);
  for (std::size_t i = 0; i < w.outcomes.size(); ++i) {
    if (w.weights[i] <= 0.0) continue;
    h.outcomes.push_back(w.outcomes[i]);
    h.counts.push_back(w.weights[i]);
    h.total += w.weights[i];
  }
  return h;
}

Mpdo scaled(const Mpdo& m, double factor) {
  std::vector<SiteTensor> sites = m.stored_sites();
  for (auto& s : sites) {
    for (int p = 0; p < s.phys_dim(); ++p) s[p] *= factor;
  }
  return m.translationally_invariant() ? Mpdo::translation_invariant(sites[0], m.kappa(), m.n_sites())
                                       : Mpdo(std::move(sites), m.kappa());
}

/// d theta of the global phase e^{i eps} applied to site 0.
RVector phase_direction(const ModelSpec& spec) {
  const auto table = parameter_table(spec);
  RVector v = RVector::Zero(static_cast<Eigen::Index>(table.size()));
  for (std::size_t a = 0; a < table.size(); ++a) {
    if (table[a].stored_site() != 0) continue;
    const cplx entry = spec.anchor.site(0)[table[a].slice()](table[a].row, table[a].col);
    v[static_cast<Eigen::Index>(a)] = table[a].part == Part::real ? -entry.imag() : entry.real();
  }
  return v;
}

void expect_gradient_matches_fd(const ModelSpec& spec, const SampleSet& samples, std::uint64_t seed) {
  const auto table = parameter_table(spec);
  const RVector theta = pack(table, spec.anchor);
  const RVector grad = nll_gradient(spec, samples);
  const auto f = [&](const RVector& t) { return nll(unpack(table, t, spec.anchor), samples); };
  Rng rng(seed);
  for (int d = 0; d < 20; ++d) {
    RVector v(theta.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
    v.normalize();
    const double fd = mpstomo::testing::directional_fd(f, theta, v);
    const double an = grad.dot(v);
    EXPECT_LT(std::abs(fd - an), 1e-6 * std::max(std::abs(an), grad.norm())) << "direction " << d;
  }
}

}  // namespace

TEST(Nll, SingleQubitEntropy) {
  SiteTensor t(2, 1, 1);
  t[0](0, 0) = 1.0;
  const State target{Mps({t})};
  const SampleSet samples = draw(target, 100000, 81);
  const double entropy = -(0.5 * std::log(0.5) + 3.0 * (1.0 / 6.0) * std::log(1.0 / 6.0));
  EXPECT_NEAR(entropy, 1.2425, 1e-4);
  EXPECT_NEAR(nll(Mpdo::from_mps(std::get<Mps>(target)), samples), entropy, 0.02);
}

TEST(Nll, ScaleInvariant) {
  const Mpdo model = Mpdo::from_mps(random_mps(5, 2, Realness::complex, 82));
  const SampleSet samples = draw(State{random_mps(5, 2, Realness::complex, 83)}, 2000, 84);
  EXPECT_NEAR(nll(scaled(model, 3.0), samples), nll(model, samples), 1e-12);
}

TEST(Nll, CrossEntropyInequality) {
  const Mps target = random_mps(4, 2, Realness::complex, 85);
  const SampleSet samples = draw(State{target}, 50000, 86);
  const ModelSpec spec = make_model(State{target}, Realness::complex, false);
  const auto table = parameter_table(spec);
  Rng rng(87);
  RVector theta = pack(table, spec.anchor);
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += 0.1 * rng.uniform(-1.0, 1.0);
  const double truth = nll(spec.anchor, samples);
  EXPECT_LT(truth, nll(unpack(table, theta, spec.anchor), samples));
}

TEST(Nll, HistogramMatchesSamples) {
  const Mpdo model = Mpdo::from_mps(random_mps(4, 2, Realness::real, 88));
  const SampleSet samples = draw(State{random_mps(4, 2, Realness::real, 89)}, 3000, 90);
  EXPECT_NEAR(nll(model, histogram(samples)), nll(model, samples), 1e-12);
}

TEST(Nll, DegenerateModelNamesOutcome) {
  SiteTensor t(2, 1, 1);
  t[0](0, 0) = 1.0;
  const Mpdo zero_state = Mpdo::from_mps(Mps({t, t}));
  // |00> measured on phi_2 (x) phi_1 has nonzero weight; an orthogonal model gives P = 0 somewhere.
  SiteTensor u(2, 1, 1);
  u[1](0, 0) = 1.0;
  SampleSet samples(2, 0, "");
  const Outcome o = parse_outcome("00");
  samples.push_back(o);
  const Mpdo one = Mpdo::from_mps(Mps({u, u}));
  EXPECT_NO_THROW(nll(zero_state, samples));
  try {
    nll(one, samples);
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("00"), std::string::npos);
  }
}

TEST(NllGradient, FiniteDifferencePure) {
  const ModelSpec spec = make_model(State{random_mps(4, 2, Realness::complex, 91)}, Realness::complex, false);
  expect_gradient_matches_fd(spec, draw(State{random_mps(4, 2, Realness::complex, 92)}, 500, 93), 94);
}

TEST(NllGradient, FiniteDifferenceMpdo) {
  const ModelSpec spec = make_model(State{random_mpdo(4, 2, 2, Realness::complex, 95)}, Realness::complex, false);
  expect_gradient_matches_fd(spec, draw(State{random_mpdo(4, 2, 2, Realness::complex, 96)}, 500, 97), 98);
}

TEST(NllGradient, StationaryAtTruth) {
  for (const State& target : {State{random_mps(4, 2, Realness::complex, 99)},
                              State{random_mpdo(3, 2, 2, Realness::complex, 100)}}) {
    const ModelSpec spec = make_model(target, Realness::complex, false);
    EXPECT_LT(nll_gradient(spec, exact_histogram(target)).norm(), 1e-10);
  }
}

TEST(NllGradient, GaugeDirectionsAreFlat) {
  const ModelSpec spec = make_model(State{random_mps(4, 2, Realness::complex, 101)}, Realness::complex, false);
  const SampleSet samples = draw(State{random_mps(4, 2, Realness::complex, 102)}, 1000, 103);
  const RVector g = nll_gradient(spec, samples);
  EXPECT_LT(std::abs(g.dot(phase_direction(spec))), 1e-10);
  EXPECT_LT(std::abs(g.dot(pack(parameter_table(spec), spec.anchor))), 1e-10);
  CMatrix x(2, 2);
  x << cplx(0.1, 0.4), cplx(-0.2, 0.3), cplx(0.5, 0.0), cplx(-0.6, 0.1);
  EXPECT_LT(std::abs(g.dot(mpstomo::testing::gauge_direction(spec, 0, x))), 1e-10);
}

TEST(NllGradient, WorkerIndependent) {
  const ModelSpec spec = make_model(State{random_mps(5, 2, Realness::complex, 104)}, Realness::complex, false);
  const OutcomeHistogram h = histogram(draw(State{random_mps(5, 2, Realness::complex, 105)}, 4000, 106));
  EXPECT_EQ(nll_gradient(spec, h, 1), nll_gradient(spec, h, 3));
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = OptimizerConfig{};
  c.restarts = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = OptimizerConfig{};
  EXPECT_EQ(c.batch_size(5000), 5000u);
  EXPECT_EQ(c.batch_size(50000), kDefaultMinibatch);
  c.minibatch_size = 0;
  EXPECT_EQ(c.batch_size(50000), 50000u);
  EXPECT_EQ(parse_optimizer_method("sgd_nesterov"), OptimizerMethod::sgd_nesterov);
  EXPECT_EQ(parse_learning_schedule("constant"), LearningSchedule::constant);
  EXPECT_THROW(parse_optimizer_method("lbfgs"), ArgumentError);
}

TEST(Reconstruct, ProductStateRecovery) {
  std::vector<SiteTensor> sites;
  Rng rng(107);
  for (int i = 0; i < 6; ++i) {
    SiteTensor t(2, 1, 1);
    t[0](0, 0) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    t[1](0, 0) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    sites.push_back(std::move(t));
  }
  const State target{Mps(std::move(sites))};
  OptimizerConfig config;
  config.restarts = 2;
  config.max_epochs = 800;
  config.learning_rate = 0.02;
  config.seed = 108;
  const ReconstructionResult r = reconstruct(draw(target, 10000, 109), ModelShape{}, config, target);
  ASSERT_TRUE(r.metrics.has_value());
  EXPECT_LT(r.metrics->d, 0.05);
  EXPECT_EQ(r.restarts.size(), 2u);
  EXPECT_NEAR(r.final_nll, r.restarts[r.best_restart].nll.back(), 1e-9);
}

TEST(Reconstruct, DeterministicAcrossWorkers) {
  const State target{random_mps(4, 2, Realness::complex, 110)};
  const SampleSet samples = draw(target, 1000, 111);
  OptimizerConfig config;
  config.restarts = 3;
  config.max_epochs = 40;
  config.seed = 112;
  const ReconstructionResult a = reconstruct(samples, ModelShape{}, config);
  config.workers = 2;
  const ReconstructionResult b = reconstruct(samples, ModelShape{}, config);
  config.workers = 4;
  const ReconstructionResult c = reconstruct(samples, ModelShape{}, config);
  EXPECT_EQ(serialize_state(a.state()), serialize_state(b.state()));
  EXPECT_EQ(serialize_state(a.state()), serialize_state(c.state()));
  EXPECT_FALSE(a.metrics.has_value());
}

TEST(Reconstruct, AllRestartsDiverging) {
  const SampleSet samples = draw(State{random_mps(3, 2, Realness::complex, 113)}, 200, 114);
  OptimizerConfig config;
  config.method = OptimizerMethod::sgd_nesterov;
  config.schedule = LearningSchedule::constant;
  config.learning_rate = 1e300;
  config.restarts = 2;
  config.max_epochs = 50;
  EXPECT_THROW(reconstruct(samples, ModelShape{}, config), OptimizationError);
}

TEST(Reconstruct, BondScanReportsNeighbours) {
  const SampleSet samples = draw(State{random_mps(4, 2, Realness::complex, 115)}, 1000, 116);
  OptimizerConfig config;
  config.restarts = 1;
  config.max_epochs = 30;
  const auto scan = bond_dimension_scan(samples, ModelShape{}, config);
  ASSERT_EQ(scan.size(), 3u);
  EXPECT_EQ(scan[0].chi, 1);
  EXPECT_EQ(scan[2].chi, 3);
  EXPECT_DOUBLE_EQ(scan[1].delta, 0.0);
}
