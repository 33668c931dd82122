#include "mpstomo/contract.hpp"

#include <cmath>
#include <string>

#include "mpstomo/error.hpp"

namespace mpstomo {

CMatrix kron(const CMatrix& x, const CMatrix& y) {
  CMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index a = 0; a < x.rows(); ++a) {
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
      out.block(a * y.rows(), b * y.cols(), y.rows(), y.cols()) = x(a, b) * y;
    }
  }
  return out;
}

cplx trace_of_product(const std::vector<CMatrix>& transfers) {
  if (transfers.empty()) throw ArgumentError("empty transfer chain");
  CMatrix acc = transfers.front();
  double log_scale = 0.0;
  for (std::size_t i = 1; i < transfers.size(); ++i) {
    acc = acc * transfers[i];
    const double norm = acc.cwiseAbs().maxCoeff();
    if (norm > 0.0 && (norm > 1e100 || norm < 1e-100)) {
      acc /= norm;
      log_scale += std::log(norm);
    }
  }
  return acc.trace() * std::exp(log_scale);
}

cplx mps_amplitude(const Mps& mps, std::span<const int> bits) {
  if (static_cast<int>(bits.size()) != mps.n_sites()) {
    throw ArgumentError("bit string length " + std::to_string(bits.size()) +
                        " does not match " + std::to_string(mps.n_sites()) + " sites");
  }
  CMatrix acc;
  for (int i = 0; i < mps.n_sites(); ++i) {
    const int s = bits[i];
    if (s != 0 && s != 1) throw ArgumentError("bits must be 0 or 1");
    if (i == 0) {
      acc = mps.site(0)[s];
    } else {
      acc = acc * mps.site(i)[s];
    }
  }
  return acc.trace();
}

cplx mps_inner(const Mps& a, const Mps& b) {
  if (a.n_sites() != b.n_sites()) throw ArgumentError("site-count mismatch in mps_inner");
  std::vector<CMatrix> transfers;
  transfers.reserve(a.n_sites());
  for (int i = 0; i < a.n_sites(); ++i) {
    CMatrix t = kron(a.site(i)[0].conjugate(), b.site(i)[0]);
    t += kron(a.site(i)[1].conjugate(), b.site(i)[1]);
    transfers.push_back(std::move(t));
  }
  return trace_of_product(transfers);
}

Mpo mpo_from_mpdo(const Mpdo& m) {
  std::vector<SiteTensor> sites;
  sites.reserve(m.n_sites());
  SiteTensor shared;
  for (int i = 0; i < m.n_sites(); ++i) {
    if (m.translationally_invariant() && i > 0) {
      sites.push_back(shared);
      continue;
    }
    const SiteTensor& c = m.site(i);
    SiteTensor a(4, c.left_dim() * c.left_dim(), c.right_dim() * c.right_dim());
    for (int k = 0; k < m.kappa(); ++k) {
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
          a[s * 2 + sp] += kron(c[k * 2 + s], c[k * 2 + sp].conjugate());
        }
      }
    }
    shared = a;
    sites.push_back(std::move(a));
  }
  return Mpo(std::move(sites));
}

Mpo mpo_from_mps(const Mps& m) { return mpo_from_mpdo(Mpdo::from_mps(m)); }

cplx mpo_trace(const Mpo& o) {
  std::vector<CMatrix> transfers;
  transfers.reserve(o.n_sites());
  for (const auto& s : o.sites()) transfers.push_back(s[0] + s[3]);
  return trace_of_product(transfers);
}

cplx mpo_hs_inner(const Mpo& a, const Mpo& b) {
  if (a.n_sites() != b.n_sites()) throw ArgumentError("site-count mismatch in mpo_hs_inner");
  // Row r = (a0, b0) of env holds the open-boundary block X_r(a_i, b_i),
  // advanced by X -> sum_p (A^p)^dagger X B^p.
  const int la = a.site(0).left_dim();
  const int lb = b.site(0).left_dim();
  std::vector<CMatrix> env(static_cast<std::size_t>(la) * lb);
  for (int x = 0; x < la; ++x) {
    for (int y = 0; y < lb; ++y) {
      CMatrix m = CMatrix::Zero(la, lb);
      m(x, y) = 1.0;
      env[static_cast<std::size_t>(x) * lb + y] = std::move(m);
    }
  }
  double log_scale = 0.0;
  for (int i = 0; i < a.n_sites(); ++i) {
    const SiteTensor& ta = a.site(i);
    const SiteTensor& tb = b.site(i);
    double norm = 0.0;
    for (auto& x : env) {
      CMatrix next = ta[0].adjoint() * x * tb[0];
      for (int p = 1; p < 4; ++p) next.noalias() += ta[p].adjoint() * x * tb[p];
      x = std::move(next);
      norm = std::max(norm, x.cwiseAbs().maxCoeff());
    }
    if (norm > 0.0 && (norm > 1e100 || norm < 1e-100)) {
      for (auto& x : env) x /= norm;
      log_scale += std::log(norm);
    }
  }
  cplx total = 0.0;
  for (int x = 0; x < la; ++x) {
    for (int y = 0; y < lb; ++y) total += env[static_cast<std::size_t>(x) * lb + y](x, y);
  }
  return total * std::exp(log_scale);
}

CVector dense_from(const Mps& mps) {
  const int n = mps.n_sites();
  if (n > kDenseVectorMaxSites) {
    throw GuardError("dense vector refused: " + std::to_string(n) + " sites exceeds guard of " +
                     std::to_string(kDenseVectorMaxSites));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  CVector out(dim);
  std::vector<int> bits(n);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    for (int i = 0; i < n; ++i) bits[i] = static_cast<int>((idx >> (n - 1 - i)) & 1);
    out[idx] = mps_amplitude(mps, bits);
  }
  return out;
}

CMatrix dense_from(const Mpo& mpo) {
  const int n = mpo.n_sites();
  if (n > kDenseMatrixMaxSites) {
    throw GuardError("dense matrix refused: " + std::to_string(n) + " sites exceeds guard of " +
                     std::to_string(kDenseMatrixMaxSites));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      CMatrix acc;
      for (int i = 0; i < n; ++i) {
        const int s = static_cast<int>((r >> (n - 1 - i)) & 1);
        const int sp = static_cast<int>((c >> (n - 1 - i)) & 1);
        if (i == 0) {
          acc = mpo.site(0)[s * 2 + sp];
        } else {
          acc = acc * mpo.site(i)[s * 2 + sp];
        }
      }
      out(r, c) = acc.trace();
    }
  }
  return out;
}

CMatrix dense_from(const Mpdo& mpdo) {
  if (mpdo.n_sites() > kDenseMatrixMaxSites) {
    throw GuardError("dense matrix refused: " + std::to_string(mpdo.n_sites()) +
                     " sites exceeds guard of " + std::to_string(kDenseMatrixMaxSites));
  }
  return dense_from(mpo_from_mpdo(mpdo));
}

CompressedMpo mpo_from_dense(const CMatrix& matrix, int chi_max, double tol) {
  const Eigen::Index dim = matrix.rows();
  if (matrix.cols() != dim || dim < 2 || (dim & (dim - 1)) != 0) {
    throw ArgumentError("mpo_from_dense needs a square 2^N x 2^N matrix");
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if (n > kDenseVectorMaxSites) {
    throw GuardError("mpo_from_dense refused: " + std::to_string(n) + " sites exceeds guard");
  }
  if (chi_max < 1) throw ArgumentError("chi_max must be positive");

  // Interleave (s_1 s_1' s_2 s_2' ...) so site i carries the pair p_i = s_i * 2 + s_i'.
  const Eigen::Index total = dim * dim;
  CVector v(total);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      Eigen::Index idx = 0;
      for (int i = 0; i < n; ++i) {
        const Eigen::Index s = (r >> (n - 1 - i)) & 1;
        const Eigen::Index sp = (c >> (n - 1 - i)) & 1;
        idx = idx * 4 + s * 2 + sp;
      }
      v[idx] = matrix(r, c);
    }
  }
  const double norm = v.norm();
  if (norm == 0.0) throw IntegrityError("mpo_from_dense: zero matrix");

  std::vector<SiteTensor> sites;
  double discarded_sq = 0.0;
  CMatrix rest = Eigen::Map<const CMatrix>(v.data(), 1, total);  // (r_prev) x (remaining)
  Eigen::Index r_prev = 1;
  for (int i = 0; i < n - 1; ++i) {
    const Eigen::Index remaining = rest.cols() / 4;
    // Rows: (a, p) with a the left bond; columns: remaining sites.
    CMatrix m(r_prev * 4, remaining);
    for (Eigen::Index a = 0; a < r_prev; ++a) {
      for (int p = 0; p < 4; ++p) {
        m.row(a * 4 + p) = rest.block(a, p * remaining, 1, remaining);
      }
    }
    Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    const double cut = tol * sv[0];
    while (rank < sv.size() && rank < chi_max && sv[rank] > cut) ++rank;
    rank = std::max<Eigen::Index>(rank, 1);
    for (Eigen::Index j = rank; j < sv.size(); ++j) discarded_sq += sv[j] * sv[j];

    SiteTensor site(4, static_cast<int>(r_prev), static_cast<int>(rank));
    for (Eigen::Index a = 0; a < r_prev; ++a) {
      for (int p = 0; p < 4; ++p) {
        site[p].row(a) = svd.matrixU().block(a * 4 + p, 0, 1, rank);
      }
    }
    sites.push_back(std::move(site));
    rest = sv.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).adjoint();
    r_prev = rank;
  }
  SiteTensor last(4, static_cast<int>(r_prev), 1);
  for (Eigen::Index a = 0; a < r_prev; ++a) {
    for (int p = 0; p < 4; ++p) last[p](a, 0) = rest(a, p);
  }
  sites.push_back(std::move(last));

  CompressedMpo out{Mpo(std::move(sites)), std::sqrt(discarded_sq) / norm};
  return out;
}

}  // namespace mpstomo
