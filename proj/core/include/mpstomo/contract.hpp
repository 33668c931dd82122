#pragma once

#include <span>
#include <vector>

#include "mpstomo/tensor.hpp"

namespace mpstomo {

/// Dense-oracle size guards; exceeding them is a GuardError.
inline constexpr int kDenseVectorMaxSites = 12;
inline constexpr int kDenseMatrixMaxSites = 8;

/// kron(x, y)[(a * y.rows() + a'), (b * y.cols() + b')] = x(a, b) * y(a', b').
CMatrix kron(const CMatrix& x, const CMatrix& y);

/// Trace of a cyclic product of transfer matrices, evaluated left to right.
cplx trace_of_product(const std::vector<CMatrix>& transfers);

/// psi_s = Tr(C_1^{s_1} ... C_N^{s_N}) in O(N chi^3).
cplx mps_amplitude(const Mps& mps, std::span<const int> bits);

/// <a|b> through the transfer operator sum_s conj(A^s) (x) B^s.
cplx mps_inner(const Mps& a, const Mps& b);

/// A^{ss'} = sum_k C_k^s (x) conj(C_k^{s'}).
Mpo mpo_from_mpdo(const Mpdo& m);
Mpo mpo_from_mps(const Mps& m);

cplx mpo_trace(const Mpo& o);

/// Tr(a^dagger b).
cplx mpo_hs_inner(const Mpo& a, const Mpo& b);

/// Full amplitude vector; basis index has site 0 as the most significant bit.
CVector dense_from(const Mps& mps);
/// Full density matrix, same basis ordering as dense_from(Mps).
CMatrix dense_from(const Mpo& mpo);
CMatrix dense_from(const Mpdo& mpdo);

struct CompressedMpo {
  Mpo mpo;
  /// ||rho - rho_hat||_F / ||rho||_F.
  double reconstruction_error = 0.0;
};

/// Sequential SVD factorization of a dense 2^N x 2^N operator into an open
/// boundary MPO. Singular values below tol * (largest at that cut) are dropped
/// and every bond is capped at chi_max.
CompressedMpo mpo_from_dense(const CMatrix& matrix, int chi_max, double tol);

}  // namespace mpstomo
