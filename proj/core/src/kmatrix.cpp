#include "mpstomo/kmatrix.hpp"

#include <cmath>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"
#include "mpstomo/sic.hpp"

namespace mpstomo {

namespace {

CMatrix unit(Eigen::Index rows, Eigen::Index cols, Eigen::Index a, Eigen::Index b) {
  CMatrix e = CMatrix::Zero(rows, cols);
  e(a, b) = 1.0;
  return e;
}

/// Holomorphic part of d A / d z for entry (k, s0, a, b): delta_{s,s0} E_ab (x) conj(C_k^{s'}).
SiteTensor holomorphic_derivative(const SiteTensor& c, int k, int s0, int a, int b) {
  const Eigen::Index l = c.left_dim();
  const Eigen::Index r = c.right_dim();
  SiteTensor d(4, static_cast<int>(l * l), static_cast<int>(r * r));
  const CMatrix e = unit(l, r, a, b);
  for (int sp = 0; sp < 2; ++sp) d[s0 * 2 + sp] = kron(e, c[k * 2 + sp].conjugate());
  return d;
}

/// sum_p x^p (x) conj(y^p).
CMatrix transfer_s(const SiteTensor& x, const SiteTensor& y) {
  CMatrix t = kron(x[0], y[0].conjugate());
  for (int p = 1; p < 4; ++p) t += kron(x[p], y[p].conjugate());
  return t;
}

/// sum_{ss'} x^{ss'} (x) y^{s's}.
CMatrix transfer_t(const SiteTensor& x, const SiteTensor& y) {
  CMatrix t = kron(x[0], y[0]);
  t += kron(x[1], y[2]);
  t += kron(x[2], y[1]);
  t += kron(x[3], y[3]);
  return t;
}

struct LocalEntry {
  int id;
  int k, s, a, b;
};

/// Tr(x y) without forming the product.
cplx trace_product(const CMatrix& x, const CMatrix& y) { return (x.array() * y.transpose().array()).sum(); }

}  // namespace

int entry_id(const Mpdo& anchor, int stored_site, int slice, int row, int col) {
  int id = 0;
  const auto& stored = anchor.stored_sites();
  for (int i = 0; i < stored_site; ++i) id += stored[i].phys_dim() * stored[i].left_dim() * stored[i].right_dim();
  const SiteTensor& t = stored[stored_site];
  return id + (slice * t.left_dim() + row) * t.right_dim() + col;
}

WirtingerBlocks wirtinger_blocks(const Mpdo& anchor_in) {
  const int n = anchor_in.n_sites();
  const double tr = mpo_trace(mpo_from_mpdo(anchor_in)).real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw IntegrityError("K matrix needs Tr(rho) > 0");
  WirtingerBlocks out;
  out.rescale = std::exp(-std::log(tr) / (2.0 * n));
  Mpdo anchor = anchor_in;
  for (auto& t : anchor.stored_sites()) {
    for (int p = 0; p < t.phys_dim(); ++p) t[p] *= out.rescale;
  }
  const Mpo mpo = mpo_from_mpdo(anchor);
  const int kappa = anchor.kappa();
  const bool ti = anchor.translationally_invariant();
  const auto& stored = anchor.stored_sites();

  std::vector<std::vector<LocalEntry>> local(stored.size());
  int total = 0;
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const SiteTensor& t = stored[i];
    for (int k = 0; k < kappa; ++k) {
      for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < t.left_dim(); ++a) {
          for (int b = 0; b < t.right_dim(); ++b) {
            local[i].push_back({entry_id(anchor, static_cast<int>(i), k * 2 + s, a, b), k, s, a, b});
            ++total;
          }
        }
      }
    }
  }
  std::vector<SiteTensor> dstore;  // derivative tensors per stored entry, indexed by id
  dstore.resize(total);
  for (std::size_t i = 0; i < stored.size(); ++i) {
    for (const auto& e : local[i]) dstore[e.id] = holomorphic_derivative(stored[i], e.k, e.s, e.a, e.b);
  }
  auto stored_of = [&](int q) { return ti ? 0 : q; };

  out.s = CMatrix::Zero(total, total);
  out.t = CMatrix::Zero(total, total);
  for (int kind = 0; kind < 2; ++kind) {
    auto transfer = [&](const SiteTensor& x, const SiteTensor& y) {
      return kind == 0 ? transfer_s(x, y) : transfer_t(x, y);
    };
    CMatrix& g = kind == 0 ? out.s : out.t;
    std::vector<CMatrix> tq(n);
    for (int q = 0; q < n; ++q) tq[q] = transfer(mpo.site(q), mpo.site(q));
    const Eigen::Index d0 = tq[0].rows();
    std::vector<CMatrix> lp(n + 1), rs(n + 1);
    lp[0] = CMatrix::Identity(d0, d0);
    for (int q = 0; q < n; ++q) lp[q + 1] = lp[q] * tq[q];
    rs[n] = CMatrix::Identity(d0, d0);
    for (int q = n - 1; q >= 0; --q) rs[q] = tq[q] * rs[q + 1];

    // VR[q][f] = V_f(q) R_{>q}: the b-insertion with the right environment attached.
    std::vector<std::vector<CMatrix>> vr(n);
    for (int q = 0; q < n; ++q) {
      for (const auto& f : local[stored_of(q)]) vr[q].push_back(transfer(mpo.site(q), dstore[f.id]) * rs[q + 1]);
    }
    for (int p = 0; p < n; ++p) {
      const auto& ep = local[stored_of(p)];
      const CMatrix env_same = rs[p + 1] * lp[p];
      for (std::size_t ei = 0; ei < ep.size(); ++ei) {
        const LocalEntry& e = ep[ei];
        for (const auto& f : ep) {
          const CMatrix w = transfer(dstore[e.id], dstore[f.id]);
          g(e.id, f.id) += trace_product(w, env_same);
        }
        CMatrix x = lp[p] * transfer(dstore[e.id], mpo.site(p));
        for (int q = p + 1; q < n; ++q) {
          const auto& fq = local[stored_of(q)];
          for (std::size_t fi = 0; fi < fq.size(); ++fi) {
            const cplx v = trace_product(x, vr[q][fi]);
            g(e.id, fq[fi].id) += v;
            g(fq[fi].id, e.id) += kind == 0 ? std::conj(v) : v;
          }
          if (q + 1 < n) x = x * tq[q];
        }
      }
    }
  }
  return out;
}

KMatrix k_matrix(const ModelSpec& spec) {
  const auto table = parameter_table(spec);
  const CVector c = parameter_directions(table, spec.anchor);
  const WirtingerBlocks w = wirtinger_blocks(spec.anchor);
  const Eigen::Index n = static_cast<Eigen::Index>(table.size());
  std::vector<int> ids(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto& p = table[a];
    ids[a] = entry_id(spec.anchor, p.stored_site(), p.slice(), p.row, p.col);
  }
  KMatrix k;
  k.values.resize(n, n);
  const double back = w.rescale * w.rescale;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const cplx v = c[a] * c[b] * w.t(ids[a], ids[b]) + c[a] * std::conj(c[b]) * w.s(ids[a], ids[b]);
      k.values(a, b) = 2.0 * v.real() * back;
    }
  }
  k.values = 0.5 * (k.values + k.values.transpose()).eval();
  return k;
}

DerivativeInsertion derivative_insertion(const ModelSpec& spec, int parameter, int position) {
  const auto table = parameter_table(spec);
  if (parameter < 0 || parameter >= static_cast<int>(table.size())) {
    throw ArgumentError("parameter index out of range");
  }
  if (position < 0 || position >= spec.n_sites()) throw ArgumentError("position out of range");
  const ParameterIndex& p = table[parameter];
  if (!spec.ti && p.site != position) {
    throw ArgumentError("parameter does not live on the requested site");
  }
  const cplx c = parameter_directions(table, spec.anchor)[parameter];
  const SiteTensor& site = spec.anchor.site(position);
  const Eigen::Index l = site.left_dim();
  const Eigen::Index r = site.right_dim();
  const CMatrix e = unit(l, r, p.row, p.col);
  DerivativeInsertion out;
  out.d = SiteTensor(4, static_cast<int>(l * l), static_cast<int>(r * r));
  for (int sp = 0; sp < 2; ++sp) {
    out.d[p.s * 2 + sp] += c * kron(e, site[p.k * 2 + sp].conjugate());
    out.d[sp * 2 + p.s] += std::conj(c) * kron(site[p.k * 2 + sp], e);
  }
  const auto& sic = sic_effects();
  for (int m = 0; m < 4; ++m) {
    CMatrix acc = CMatrix::Zero(l * l, r * r);
    for (int s = 0; s < 2; ++s) {
      for (int sp = 0; sp < 2; ++sp) acc += sic.weight[m](s, sp) * out.d[s * 2 + sp];
    }
    out.g[m] = std::move(acc);
  }
  return out;
}

}  // namespace mpstomo
