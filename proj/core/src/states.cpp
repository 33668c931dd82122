#include "mpstomo/states.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/rng.hpp"

namespace mpstomo {

Realness parse_realness(const std::string& name) {
  if (name == "real") return Realness::real;
  if (name == "complex") return Realness::complex;
  throw ArgumentError("realness must be 'real' or 'complex', got '" + name + "'");
}

std::string to_string(Realness r) { return r == Realness::real ? "real" : "complex"; }

namespace {

void fill_random(SiteTensor& t, Realness realness, Rng& rng) {
  for (int p = 0; p < t.phys_dim(); ++p) {
    for (int a = 0; a < t.left_dim(); ++a) {
      for (int b = 0; b < t.right_dim(); ++b) {
        const double re = rng.uniform(-1.0, 1.0);
        const double im = realness == Realness::complex ? rng.uniform(-1.0, 1.0) : 0.0;
        t[p](a, b) = cplx(re, im);
      }
    }
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ArgumentError(msg);
}

SiteTensor diagonal_pair(cplx d00, cplx d01, cplx d10, cplx d11) {
  SiteTensor t(2, 2, 2);
  t[0](0, 0) = d00;
  t[0](1, 1) = d01;
  t[1](0, 0) = d10;
  t[1](1, 1) = d11;
  return t;
}

}  // namespace

Mps random_mps(int n, int chi, Realness realness, std::uint64_t seed) {
  require(n >= 2, "random_mps needs n >= 2");
  require(chi >= 1, "random_mps needs chi >= 1");
  Rng rng(seed);
  std::vector<SiteTensor> sites;
  for (int i = 0; i < n; ++i) {
    SiteTensor t(2, chi, chi);
    fill_random(t, realness, rng);
    sites.push_back(std::move(t));
  }
  return Mps(std::move(sites));
}

Mpdo random_mpdo(int n, int chi, int kappa, Realness realness, std::uint64_t seed) {
  require(n >= 2, "random_mpdo needs n >= 2");
  require(chi >= 1 && kappa >= 1, "random_mpdo needs chi, kappa >= 1");
  Rng rng(seed);
  std::vector<SiteTensor> sites;
  for (int i = 0; i < n; ++i) {
    SiteTensor t(2 * kappa, chi, chi);
    fill_random(t, realness, rng);
    sites.push_back(std::move(t));
  }
  return Mpdo(std::move(sites), kappa);
}

Mps cluster_state(int n) {
  require(n >= 2, "cluster_state needs n >= 2");
  SiteTensor t(2, 2, 2);
  t[0] << 0, 0, 1, 1;
  t[1] << 1, -1, 0, 0;
  return Mps::translation_invariant(std::move(t), n);
}

Mps ghz_state(int n) {
  require(n >= 2, "ghz_state needs n >= 2");
  return Mps::translation_invariant(diagonal_pair(1, 0, 0, 1), n);
}

Mps generalized_ghz(int n, double rot_gamma) {
  require(n >= 2, "generalized_ghz needs n >= 2");
  const double c = std::cos(rot_gamma);
  const double s = std::sin(rot_gamma);
  return Mps::translation_invariant(diagonal_pair(c, s, -s, c), n);
}

Mps phase_ghz(int n, double phi1, double phi2) {
  require(n >= 2, "phase_ghz needs n >= 2");
  return Mps::translation_invariant(
      diagonal_pair(std::polar(1.0, phi1), 0, 0, std::polar(1.0, phi2)), n);
}

CMatrix rotation(double rot_gamma) {
  CMatrix u(2, 2);
  u << std::cos(rot_gamma), -std::sin(rot_gamma), std::sin(rot_gamma), std::cos(rot_gamma);
  return u;
}

CMatrix ising_hamiltonian_dense(int n, double field_b) {
  if (n < kThermalMinSites || n > kThermalMaxSites) {
    throw GuardError("thermal Ising target needs " + std::to_string(kThermalMinSites) +
                     " <= n <= " + std::to_string(kThermalMaxSites) + ", got " +
                     std::to_string(n));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    double diag = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
      const int zj = ((idx >> (n - 1 - j)) & 1) ? -1 : 1;
      const int zk = ((idx >> (n - 2 - j)) & 1) ? -1 : 1;
      diag += zj * zk;
    }
    h(idx, idx) = diag;
    for (int j = 0; j < n; ++j) h(idx ^ (Eigen::Index{1} << (n - 1 - j)), idx) += field_b;
  }
  return h;
}

CMatrix thermal_ising_dense(int n, double field_b, double temperature) {
  if (!(temperature > 0.0)) throw ArgumentError("temperature must be positive");
  const CMatrix h = ising_hamiltonian_dense(n, field_b);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const RVector& e = eig.eigenvalues();
  const double e0 = e.minCoeff();
  RVector w = (-(e.array() - e0) / temperature).exp();
  w /= w.sum();
  CMatrix rho = eig.eigenvectors() * w.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return rho;
}

StateKind parse_state_kind(const std::string& name) {
  std::string s = name;
  for (auto& c : s) {
    if (c == '-') c = '_';
  }
  if (s == "random_mps") return StateKind::random_mps;
  if (s == "random_mpdo") return StateKind::random_mpdo;
  if (s == "cluster") return StateKind::cluster;
  if (s == "ghz") return StateKind::ghz;
  if (s == "generalized_ghz") return StateKind::generalized_ghz;
  if (s == "phase_ghz") return StateKind::phase_ghz;
  if (s == "thermal_ising") return StateKind::thermal_ising;
  throw ArgumentError("unknown state kind '" + name + "'");
}

std::string to_string(StateKind kind) {
  switch (kind) {
    case StateKind::random_mps: return "random_mps";
    case StateKind::random_mpdo: return "random_mpdo";
    case StateKind::cluster: return "cluster";
    case StateKind::ghz: return "ghz";
    case StateKind::generalized_ghz: return "generalized_ghz";
    case StateKind::phase_ghz: return "phase_ghz";
    case StateKind::thermal_ising: return "thermal_ising";
  }
  return "unknown";
}

void validate(const StateSpec& spec) {
  const auto k = spec.kind;
  const std::string name = to_string(k);
  require(spec.n_sites >= 1, name + ": n must be positive");
  const bool wants_gamma = k == StateKind::generalized_ghz;
  const bool wants_phi = k == StateKind::phase_ghz;
  const bool wants_thermal = k == StateKind::thermal_ising;
  require(spec.rot_gamma.has_value() == wants_gamma,
          wants_gamma ? name + " requires rot_gamma" : "rot_gamma is not a parameter of " + name);
  require(spec.phi1.has_value() == wants_phi && spec.phi2.has_value() == wants_phi,
          wants_phi ? name + " requires phi1 and phi2" : "phi1/phi2 are not parameters of " + name);
  require(spec.field_b.has_value() == wants_thermal && spec.temperature.has_value() == wants_thermal,
          wants_thermal ? name + " requires field_b and temperature"
                        : "field_b/temperature are not parameters of " + name);
  require(spec.chi >= 1, "chi must be positive");
  require(spec.kappa >= 1, "kappa must be positive");
  require(k == StateKind::random_mpdo || spec.kappa == 1, "kappa is only a parameter of random_mpdo");
}

BuiltState make_state(const StateSpec& spec) {
  validate(spec);
  const int n = spec.n_sites;
  switch (spec.kind) {
    case StateKind::random_mps: return {random_mps(n, spec.chi, spec.realness, spec.seed)};
    case StateKind::random_mpdo:
      return {random_mpdo(n, spec.chi, spec.kappa, spec.realness, spec.seed)};
    case StateKind::cluster: return {cluster_state(n)};
    case StateKind::ghz: return {ghz_state(n)};
    case StateKind::generalized_ghz: return {generalized_ghz(n, *spec.rot_gamma)};
    case StateKind::phase_ghz: return {phase_ghz(n, *spec.phi1, *spec.phi2)};
    case StateKind::thermal_ising: {
      const CMatrix rho = thermal_ising_dense(n, *spec.field_b, *spec.temperature);
      auto c = mpo_from_dense(rho, spec.compress_chi_max, spec.compress_tol);
      return {std::move(c.mpo), c.reconstruction_error};
    }
  }
  throw ArgumentError("unhandled state kind");
}

}  // namespace mpstomo
