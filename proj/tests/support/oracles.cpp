#include "oracles.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "mpstomo/contract.hpp"

namespace mpstomo::testing {

CMatrix dense_rho(const State& state) { return dense_from(to_mpo(state)); }

std::vector<CMatrix> dense_rho_derivatives(const ModelSpec& spec) {
  const auto table = parameter_table(spec);
  const CVector dirs = parameter_directions(table, spec.anchor);
  const Mpdo base = spec.ti ? expand_ti(spec.anchor) : spec.anchor;
  const double h = 1e-2;
  std::vector<CMatrix> out;
  for (std::size_t a = 0; a < table.size(); ++a) {
    const auto& p = table[a];
    CMatrix acc;
    for (int site = 0; site < spec.n_sites(); ++site) {
      if (!spec.ti && site != p.site) continue;
      Mpdo plus = base;
      Mpdo minus = base;
      plus.site(site)[p.slice()](p.row, p.col) += h * dirs[static_cast<Eigen::Index>(a)];
      minus.site(site)[p.slice()](p.row, p.col) -= h * dirs[static_cast<Eigen::Index>(a)];
      const CMatrix d = (dense_from(plus) - dense_from(minus)) / (2.0 * h);
      acc = acc.size() == 0 ? d : CMatrix(acc + d);
    }
    out.push_back(acc);
  }
  return out;
}

RMatrix dense_k(const ModelSpec& spec) {
  const auto d = dense_rho_derivatives(spec);
  const double tr = dense_from(spec.anchor).trace().real();
  const auto n = static_cast<Eigen::Index>(d.size());
  RMatrix k(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) k(a, b) = (d[a].array() * d[b].conjugate().array()).sum().real();
  }
  return k / (tr * tr);
}

RMatrix dense_fisher(const ModelSpec& spec) {
  const int n_sites = spec.n_sites();
  const CMatrix rho = dense_from(spec.anchor);
  const double tr = rho.trace().real();
  const auto p = dense_outcome_probabilities(rho, n_sites);
  std::vector<std::vector<double>> dp;
  for (const auto& d : dense_rho_derivatives(spec)) dp.push_back(dense_outcome_probabilities(d, n_sites));
  const auto n = static_cast<Eigen::Index>(dp.size());
  RMatrix out = RMatrix::Zero(n, n);
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (p[m] <= 0.0) continue;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) out(a, b) += dp[a][m] * dp[b][m] / p[m];
    }
  }
  return out / tr;
}

RVector gauge_direction(const ModelSpec& spec, int bond, const CMatrix& x) {
  const auto table = parameter_table(spec);
  const int n = spec.n_sites();
  const int next = (bond + 1) % n;
  std::vector<SiteTensor> delta;
  for (int i = 0; i < n; ++i) {
    SiteTensor t = spec.anchor.site(i);
    for (int p = 0; p < t.phys_dim(); ++p) {
      CMatrix d = CMatrix::Zero(t.left_dim(), t.right_dim());
      if (i == bond) d += spec.anchor.site(i)[p] * x;
      if (i == next) d -= x * spec.anchor.site(i)[p];
      t[p] = d;
    }
    delta.push_back(std::move(t));
  }
  RVector v(static_cast<Eigen::Index>(table.size()));
  for (std::size_t a = 0; a < table.size(); ++a) {
    const auto& p = table[a];
    const cplx d = delta[p.stored_site()][p.slice()](p.row, p.col);
    v[static_cast<Eigen::Index>(a)] = p.part == Part::real ? d.real() : d.imag();
  }
  return v;
}

double directional_fd(const std::function<double(const RVector&)>& f, const RVector& x, const RVector& v,
                      double step) {
  return (f(x + step * v) - f(x - step * v)) / (2.0 * step);
}

double rel_err(const RMatrix& a, const RMatrix& b, double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

CVector cluster_circuit(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  CVector psi = CVector::Constant(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    int sign = 1;
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      const auto bi = (idx >> (n - 1 - i)) & 1;
      const auto bj = (idx >> (n - 1 - j)) & 1;
      if (bi && bj) sign = -sign;
    }
    psi[idx] *= static_cast<double>(sign);
  }
  return psi;
}

WeightedOutcomes enumerate_outcomes(const State& state) {
  const int n = n_sites(state);
  const auto p = dense_outcome_probabilities(dense_rho(state), n);
  double total = 0.0;
  for (double v : p) total += v;
  WeightedOutcomes out;
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    if (p[idx] <= 0.0) continue;
    Outcome m(n);
    for (int i = 0; i < n; ++i) m[i] = static_cast<std::uint8_t>((idx >> (2 * (n - 1 - i))) & 3);
    out.outcomes.push_back(std::move(m));
    out.weights.push_back(p[idx] / total);
  }
  return out;
}

double chi_square_p_value(double statistic, int dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

double ks_p_value(double d, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    sum += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace mpstomo::testing
