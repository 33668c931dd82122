#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mpstomo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// One site of a chain: a left_dim x right_dim complex matrix per physical
/// index. Entries are addressed (phys, left, right).
class SiteTensor {
 public:
  SiteTensor() = default;
  SiteTensor(int phys_dim, int left_dim, int right_dim);
  explicit SiteTensor(std::vector<CMatrix> slices);

  int phys_dim() const { return static_cast<int>(slices_.size()); }
  int left_dim() const { return left_; }
  int right_dim() const { return right_; }

  const CMatrix& operator[](int phys) const { return slices_[phys]; }
  CMatrix& operator[](int phys) { return slices_[phys]; }
  const std::vector<CMatrix>& slices() const { return slices_; }

  bool all_finite() const;
  bool operator==(const SiteTensor& other) const;

 private:
  int left_ = 0;
  int right_ = 0;
  std::vector<CMatrix> slices_;
};

/// Pure state psi_s = Tr(C_1^{s_1} ... C_N^{s_N}). Open chains use boundary
/// bond dimension 1. A translationally invariant state stores one tensor.
class Mps {
 public:
  Mps() = default;
  explicit Mps(std::vector<SiteTensor> sites);
  static Mps translation_invariant(SiteTensor site, int n_sites);

  int n_sites() const { return n_sites_; }
  bool translationally_invariant() const { return ti_; }
  const SiteTensor& site(int i) const { return sites_[ti_ ? 0 : i]; }
  SiteTensor& site(int i) { return sites_[ti_ ? 0 : i]; }
  const std::vector<SiteTensor>& stored_sites() const { return sites_; }
  /// Largest bond dimension.
  int chi() const;

 private:
  int n_sites_ = 0;
  bool ti_ = false;
  std::vector<SiteTensor> sites_;
};

/// Locally purified density operator. Each site tensor carries 2*kappa
/// slices, slice index = k * 2 + s for Kraus index k and spin s.
class Mpdo {
 public:
  Mpdo() = default;
  Mpdo(std::vector<SiteTensor> sites, int kappa);
  static Mpdo translation_invariant(SiteTensor site, int kappa, int n_sites);
  static Mpdo from_mps(const Mps& mps);

  int n_sites() const { return n_sites_; }
  int kappa() const { return kappa_; }
  bool translationally_invariant() const { return ti_; }
  const SiteTensor& site(int i) const { return sites_[ti_ ? 0 : i]; }
  SiteTensor& site(int i) { return sites_[ti_ ? 0 : i]; }
  const CMatrix& slice(int i, int k, int s) const { return site(i)[k * 2 + s]; }
  const std::vector<SiteTensor>& stored_sites() const { return sites_; }
  std::vector<SiteTensor>& stored_sites() { return sites_; }
  int chi() const;
  /// Valid only when kappa == 1.
  Mps to_mps() const;

 private:
  int n_sites_ = 0;
  int kappa_ = 1;
  bool ti_ = false;
  std::vector<SiteTensor> sites_;
};

/// rho_{s,s'} = Tr(A_1^{s_1 s_1'} ... A_N^{s_N s_N'}), phys index = s * 2 + s'.
class Mpo {
 public:
  Mpo() = default;
  explicit Mpo(std::vector<SiteTensor> sites);

  int n_sites() const { return static_cast<int>(sites_.size()); }
  const SiteTensor& site(int i) const { return sites_[i]; }
  const std::vector<SiteTensor>& sites() const { return sites_; }
  int max_bond() const;

 private:
  std::vector<SiteTensor> sites_;
};

/// Throws ArgumentError unless right_dim(i) == left_dim(i+1) cyclically.
void check_bonds(const std::vector<SiteTensor>& sites, int n_sites, bool ti);

}  // namespace mpstomo
