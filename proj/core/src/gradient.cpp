#include "mpstomo/gradient.hpp"

#include <cmath>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"

namespace mpstomo {

namespace {

struct Workspace {
  std::vector<CMatrix> lp, rs;
  std::vector<double> lsl, lsr;
  CMatrix env;

  void ensure(int n) {
    if (static_cast<int>(lp.size()) < n) {
      lp.resize(n);
      rs.resize(n);
      lsl.resize(n);
      lsr.resize(n);
    }
  }
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

double rescale(CMatrix& m) {
  const double norm = m.cwiseAbs().maxCoeff();
  if (norm > 1e30 || (norm < 1e-30 && norm > 0.0)) {
    m /= norm;
    return std::log(norm);
  }
  return 0.0;
}

/// Fills ws.lp (inclusive prefixes) and ws.rs (inclusive suffixes) of a chain.
template <class Get>
void sweep(int n, Get&& get, Workspace& ws, bool suffixes) {
  ws.ensure(n);
  ws.lp[0] = get(0);
  ws.lsl[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    ws.lp[i].noalias() = ws.lp[i - 1] * get(i);
    ws.lsl[i] = ws.lsl[i - 1] + rescale(ws.lp[i]);
  }
  if (!suffixes) return;
  ws.rs[n - 1] = get(n - 1);
  ws.lsr[n - 1] = 0.0;
  for (int i = n - 2; i >= 1; --i) {
    ws.rs[i].noalias() = get(i) * ws.rs[i + 1];
    ws.lsr[i] = ws.lsr[i + 1] + rescale(ws.rs[i]);
  }
}

/// Environment of site i (product of every other site, starting right of i),
/// written into ws.env; returns its log scale.
double environment(int n, int i, Eigen::Index dim_right, Workspace& ws) {
  if (n == 1) {
    ws.env = CMatrix::Identity(dim_right, dim_right);
    return 0.0;
  }
  if (i == 0) {
    ws.env = ws.rs[1];
    return ws.lsr[1];
  }
  if (i == n - 1) {
    ws.env = ws.lp[n - 2];
    return ws.lsl[n - 2];
  }
  ws.env.noalias() = ws.rs[i + 1] * ws.lp[i - 1];
  return ws.lsr[i + 1] + ws.lsl[i - 1];
}

/// out(a, b) += factor * sum_{a'b'} env[(b, b'), (a, a')] x(a', b').
void contract_env(const CMatrix& env, const CMatrix& x, cplx factor, CMatrix& out) {
  const Eigen::Index l = x.rows();
  const Eigen::Index r = x.cols();
  for (Eigen::Index a = 0; a < l; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      cplx sum = 0.0;
      for (Eigen::Index ap = 0; ap < l; ++ap) {
        for (Eigen::Index bp = 0; bp < r; ++bp) sum += env(b * r + bp, a * l + ap) * x(ap, bp);
      }
      out(a, b) += factor * sum;
    }
  }
}

}  // namespace

LikelihoodEngine::LikelihoodEngine(const Mpdo& model, const SicEffects& sic)
    : model_(model), n_(model.n_sites()), kappa_(model.kappa()), pure_(model.kappa() == 1) {
  for (int m = 0; m < 4; ++m) {
    for (int s = 0; s < 2; ++s) phi_conj_[m * 2 + s] = std::conj(sic.phi[m](s));
  }
  const auto& stored = model_.stored_sites();
  f_.resize(stored.size());
  b_.resize(stored.size());
  marginal_.resize(stored.size());
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const SiteTensor& c = stored[i];
    f_[i].resize(4 * kappa_);
    const Eigen::Index l = c.left_dim();
    const Eigen::Index r = c.right_dim();
    marginal_[i] = CMatrix::Zero(l * l, r * r);
    for (int m = 0; m < 4; ++m) b_[i][m] = CMatrix::Zero(l * l, r * r);
    for (int k = 0; k < kappa_; ++k) {
      for (int m = 0; m < 4; ++m) {
        CMatrix f = phi_conj_[m * 2] * c[k * 2] + phi_conj_[m * 2 + 1] * c[k * 2 + 1];
        if (!pure_) b_[i][m] += kron(f, f.conjugate());
        f_[i][m * kappa_ + k] = std::move(f);
      }
      for (int s = 0; s < 2; ++s) marginal_[i] += kron(c[k * 2 + s], c[k * 2 + s].conjugate());
    }
  }
}

double LikelihoodEngine::log_prob(std::span<const std::uint8_t> m, double weight, TensorGrad* grad) const {
  if (static_cast<int>(m.size()) != n_) throw ArgumentError("outcome length does not match the model");
  for (auto v : m) {
    if (v > 3) throw ArgumentError("outcome symbols must be 0..3");
  }
  return pure_ ? log_prob_pure(m, weight, grad) : log_prob_mixed(m, weight, grad);
}

double LikelihoodEngine::log_prob_pure(std::span<const std::uint8_t> m, double weight, TensorGrad* grad) const {
  Workspace& ws = workspace();
  const bool want_grad = grad != nullptr && weight != 0.0;
  sweep(n_, [&](int i) -> const CMatrix& { return f_[stored_index(i)][m[i]]; }, ws, want_grad);
  const cplx phi = ws.lp[n_ - 1].trace();
  const double log_scale = ws.lsl[n_ - 1];
  if (std::abs(phi) == 0.0) {
    throw IntegrityError("model assigns zero probability to outcome " + format_outcome(m));
  }
  const double log_p = 2.0 * (std::log(std::abs(phi)) + log_scale);
  if (!want_grad) return log_p;
  for (int i = 0; i < n_; ++i) {
    const auto& fi = f_[stored_index(i)][m[i]];
    const double ls = environment(n_, i, fi.cols(), ws);
    const cplx factor = weight * std::exp(ls - log_scale) / phi;
    SiteTensor& g = (*grad)[stored_index(i)];
    for (int s = 0; s < 2; ++s) g[s] += (factor * phi_conj_[m[i] * 2 + s]) * ws.env.transpose();
  }
  return log_p;
}

double LikelihoodEngine::log_prob_mixed(std::span<const std::uint8_t> m, double weight, TensorGrad* grad) const {
  Workspace& ws = workspace();
  const bool want_grad = grad != nullptr && weight != 0.0;
  sweep(n_, [&](int i) -> const CMatrix& { return b_[stored_index(i)][m[i]]; }, ws, want_grad);
  const double p = ws.lp[n_ - 1].trace().real();
  const double log_scale = ws.lsl[n_ - 1];
  if (!(p > 0.0)) {
    throw IntegrityError("model assigns non-positive probability to outcome " + format_outcome(m));
  }
  const double log_p = std::log(p) + log_scale;
  if (!want_grad) return log_p;
  for (int i = 0; i < n_; ++i) {
    const int si = stored_index(i);
    const double ls = environment(n_, i, model_.site(i).right_dim() * model_.site(i).right_dim(), ws);
    const double scale = weight * std::exp(ls - log_scale) / p;
    SiteTensor& g = (*grad)[si];
    for (int k = 0; k < kappa_; ++k) {
      const CMatrix fc = f_[si][m[i] * kappa_ + k].conjugate();
      for (int s = 0; s < 2; ++s) contract_env(ws.env, fc, scale * phi_conj_[m[i] * 2 + s], g[k * 2 + s]);
    }
  }
  return log_p;
}

double LikelihoodEngine::log_z(double weight, TensorGrad* grad) const {
  Workspace& ws = workspace();
  const bool want_grad = grad != nullptr && weight != 0.0;
  sweep(n_, [&](int i) -> const CMatrix& { return marginal_[stored_index(i)]; }, ws, want_grad);
  const double z = ws.lp[n_ - 1].trace().real();
  const double log_scale = ws.lsl[n_ - 1];
  if (!(z > 0.0)) throw IntegrityError("model has Tr(rho) <= 0");
  const double log_z = std::log(z) + log_scale;
  if (!want_grad) return log_z;
  for (int i = 0; i < n_; ++i) {
    const int si = stored_index(i);
    const SiteTensor& c = model_.site(i);
    const double ls = environment(n_, i, c.right_dim() * c.right_dim(), ws);
    const double scale = weight * std::exp(ls - log_scale) / z;
    SiteTensor& g = (*grad)[si];
    for (int p = 0; p < c.phys_dim(); ++p) contract_env(ws.env, c[p].conjugate(), scale, g[p]);
  }
  return log_z;
}

RVector grad_log_prob(const ModelSpec& spec, std::span<const std::uint8_t> m) {
  const LikelihoodEngine engine(spec.anchor);
  TensorGrad g = zero_grad(spec.anchor);
  engine.log_prob(m, 1.0, &g);
  const auto table = parameter_table(spec);
  return project(table, parameter_directions(table, spec.anchor), g);
}

}  // namespace mpstomo
