#include "mpstomo/crb.hpp"

#include <cmath>
#include <string>

#include "mpstomo/error.hpp"
#include "mpstomo/states.hpp"

namespace mpstomo {

CrbResult crb_trace(const RMatrix& k, const RMatrix& fisher, double cutoff, double leak_tol) {
  const Eigen::Index n = fisher.rows();
  if (fisher.cols() != n || k.rows() != n || k.cols() != n) {
    throw ArgumentError("crb_trace: K is " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                        ", I is " + std::to_string(fisher.rows()) + "x" + std::to_string(fisher.cols()));
  }
  if (!(cutoff >= 0.0)) throw ArgumentError("crb_trace: cutoff must be non-negative");
  CrbResult out;
  if (n == 0) return out;

  RVector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = fisher(i, i);
    d[i] = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
  }
  const RMatrix scaled_i = d.asDiagonal() * (0.5 * (fisher + fisher.transpose())) * d.asDiagonal();
  const RMatrix scaled_k = d.asDiagonal() * (0.5 * (k + k.transpose())) * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(scaled_i);
  if (eig.info() != Eigen::Success) throw IntegrityError("crb_trace: eigendecomposition failed");
  const RVector& lambda = eig.eigenvalues();
  const RMatrix& vecs = eig.eigenvectors();
  const double threshold = cutoff * lambda.maxCoeff();

  Eigen::SelfAdjointEigenSolver<RMatrix> keig(0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly);
  const double k_norm = keig.eigenvalues().cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto v = vecs.col(j);
    if (lambda[j] > threshold && lambda[j] > 0.0) {
      out.tr_ki += v.dot(scaled_k * v) / lambda[j];
      continue;
    }
    ++out.discarded_dim;
    RVector u = d.asDiagonal() * v;
    u.normalize();
    const double leak = k_norm > 0.0 ? (k * u).norm() / k_norm : 0.0;
    out.max_leak = std::max(out.max_leak, leak);
  }
  if (out.max_leak > leak_tol) {
    throw GaugeMismatchError("K acts on the discarded null space of I: leak " + std::to_string(out.max_leak) +
                             " exceeds " + std::to_string(leak_tol) + " (" +
                             std::to_string(out.discarded_dim) + " directions dropped)");
  }
  return out;
}

double infidelity_bound(double tr_ki, double samples) {
  if (!(samples >= 1.0)) throw ArgumentError("infidelity_bound needs at least one sample");
  return tr_ki / (2.0 * samples);
}

GhzCoefficients ghz_coefficients(int n) {
  const ModelSpec spec = make_model(ghz_state(n), Realness::real, true, true);
  const RMatrix info = fisher_exact_diagonal_ti(spec).values;
  const double n2 = static_cast<double>(n) * n;
  return {info(0, 0) / n2, info(0, 3) / n2};
}

namespace {

/// Canonical index of a diagonal GHZ parameter: element a in 0..3 is
/// (s0,d0), (s0,d1), (s1,d0), (s1,d1); part 0 = real, 1 = imag.
Eigen::Index canonical(int site, int a, int part, int parts) {
  return static_cast<Eigen::Index>(site) * 4 * parts + a * parts + part;
}

}  // namespace

GhzAnalytic ghz_analytic_ki(int n, bool ti, Realness realness) {
  if (n < 3) throw ArgumentError("ghz_analytic_ki needs n >= 3");
  const int parts = realness == Realness::complex ? 2 : 1;
  const int sites = ti ? 1 : n;
  const Eigen::Index dim = static_cast<Eigen::Index>(sites) * 4 * parts;
  GhzAnalytic out;
  out.coefficients = ghz_coefficients(n);
  const double g = out.coefficients.gamma;
  const double dl = out.coefficients.delta;
  RMatrix k = RMatrix::Zero(dim, dim);
  RMatrix info = RMatrix::Zero(dim, dim);
  const double nn = static_cast<double>(n);

  if (ti) {
    const double n2 = nn * nn;
    auto set = [](RMatrix& m, Eigen::Index r, Eigen::Index c, double v) { m(r, c) = m(c, r) = v; };
    const auto re = [&](int a) { return canonical(0, a, 0, parts); };
    set(k, re(0), re(0), 1.5 * n2);
    set(k, re(3), re(3), 1.5 * n2);
    set(k, re(0), re(3), 0.5 * n2);
    set(k, re(1), re(1), nn);
    set(k, re(2), re(2), nn);
    set(info, re(0), re(0), g * n2);
    set(info, re(3), re(3), g * n2);
    set(info, re(0), re(3), dl * n2);
    set(info, re(1), re(1), nn);
    set(info, re(2), re(2), nn);
    if (parts == 2) {
      const auto im = [&](int a) { return canonical(0, a, 1, parts); };
      set(k, im(0), im(0), 0.5 * n2);
      set(k, im(3), im(3), 0.5 * n2);
      set(k, im(0), im(3), -0.5 * n2);
      set(k, im(1), im(1), nn);
      set(k, im(2), im(2), nn);
      set(info, im(0), im(0), dl * n2);
      set(info, im(3), im(3), dl * n2);
      set(info, im(0), im(3), -dl * n2);
      set(info, im(1), im(1), nn);
      set(info, im(2), im(2), nn);
    }
  } else {
    // Blocks over sites: all-ones couples every (i, j) pair, identity only i == j.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto re = [&](int site, int a) { return canonical(site, a, 0, parts); };
        k(re(i, 0), re(j, 0)) = 1.5;
        k(re(i, 3), re(j, 3)) = 1.5;
        k(re(i, 0), re(j, 3)) = k(re(i, 3), re(j, 0)) = 0.5;
        info(re(i, 0), re(j, 0)) = g;
        info(re(i, 3), re(j, 3)) = g;
        info(re(i, 0), re(j, 3)) = info(re(i, 3), re(j, 0)) = dl;
        if (parts == 2) {
          const auto im = [&](int site, int a) { return canonical(site, a, 1, parts); };
          k(im(i, 0), im(j, 0)) = 0.5;
          k(im(i, 3), im(j, 3)) = 0.5;
          k(im(i, 0), im(j, 3)) = k(im(i, 3), im(j, 0)) = -0.5;
          info(im(i, 0), im(j, 0)) = dl;
          info(im(i, 3), im(j, 3)) = dl;
          info(im(i, 0), im(j, 3)) = info(im(i, 3), im(j, 0)) = -dl;
        }
      }
      const auto re = [&](int a) { return canonical(i, a, 0, parts); };
      k(re(1), re(1)) = k(re(2), re(2)) = 1.0;
      info(re(1), re(1)) = info(re(2), re(2)) = 1.0;
      info(re(1), re(2)) = info(re(2), re(1)) = dl;
      if (parts == 2) {
        const auto im = [&](int a) { return canonical(i, a, 1, parts); };
        k(im(1), im(1)) = k(im(2), im(2)) = 1.0;
        info(im(1), im(1)) = info(im(2), im(2)) = 1.0;
      }
    }
  }
  out.k.values = std::move(k);
  out.k.provenance = "analytic";
  out.fisher.values = std::move(info);
  out.fisher.provenance = "analytic";
  return out;
}

double generalized_ghz_bound(int n, double rot_gamma) {
  const ModelSpec spec = make_model(generalized_ghz(n, rot_gamma), Realness::complex, true, true);
  return crb_trace(k_matrix(spec).values, fisher_exact_diagonal_ti(spec).values).tr_ki;
}

ZetaFit zeta_fit(double rot_gamma, const std::vector<int>& n_values) {
  if (n_values.size() < 2) throw ArgumentError("zeta_fit needs at least two N values");
  ZetaFit out;
  out.n_values = n_values;
  RMatrix design(static_cast<Eigen::Index>(n_values.size()), 2);
  RVector rhs(design.rows());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double b = generalized_ghz_bound(n_values[i], rot_gamma);
    if (!(b > 0.0)) {
      throw IntegrityError("zeta_fit: non-positive bound " + std::to_string(b) + " at N = " +
                           std::to_string(n_values[i]));
    }
    out.bounds.push_back(b);
    design(static_cast<Eigen::Index>(i), 0) = n_values[i];
    design(static_cast<Eigen::Index>(i), 1) = 1.0;
    rhs[static_cast<Eigen::Index>(i)] = std::log(b);
  }
  const RVector coef = design.colPivHouseholderQr().solve(rhs);
  out.zeta = std::exp(coef[0]);
  return out;
}

}  // namespace mpstomo
