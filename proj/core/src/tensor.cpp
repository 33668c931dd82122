#include "mpstomo/tensor.hpp"

#include <algorithm>
#include <string>

#include "mpstomo/error.hpp"

namespace mpstomo {

SiteTensor::SiteTensor(int phys_dim, int left_dim, int right_dim)
    : left_(left_dim), right_(right_dim) {
  if (phys_dim < 1 || left_dim < 1 || right_dim < 1) {
    throw ArgumentError("site tensor dimensions must be positive");
  }
  slices_.assign(phys_dim, CMatrix::Zero(left_dim, right_dim));
}

SiteTensor::SiteTensor(std::vector<CMatrix> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) throw ArgumentError("site tensor needs at least one slice");
  left_ = static_cast<int>(slices_.front().rows());
  right_ = static_cast<int>(slices_.front().cols());
  if (left_ < 1 || right_ < 1) throw ArgumentError("site tensor dimensions must be positive");
  for (const auto& s : slices_) {
    if (s.rows() != left_ || s.cols() != right_) {
      throw ArgumentError("site tensor slices have mismatched shapes");
    }
  }
}

bool SiteTensor::all_finite() const {
  return std::all_of(slices_.begin(), slices_.end(),
                     [](const CMatrix& m) { return m.allFinite(); });
}

bool SiteTensor::operator==(const SiteTensor& other) const {
  if (phys_dim() != other.phys_dim() || left_ != other.left_ || right_ != other.right_) {
    return false;
  }
  for (int p = 0; p < phys_dim(); ++p) {
    if (slices_[p] != other.slices_[p]) return false;
  }
  return true;
}

void check_bonds(const std::vector<SiteTensor>& sites, int n_sites, bool ti) {
  if (n_sites < 1) throw ArgumentError("chain needs at least one site");
  if (ti) {
    if (sites.size() != 1) throw ArgumentError("translation-invariant chain stores one tensor");
    if (sites[0].left_dim() != sites[0].right_dim()) {
      throw ArgumentError("translation-invariant site tensor must be square");
    }
    return;
  }
  if (static_cast<int>(sites.size()) != n_sites) throw ArgumentError("site count mismatch");
  for (int i = 0; i < n_sites; ++i) {
    const int next = (i + 1) % n_sites;
    if (sites[i].right_dim() != sites[next].left_dim()) {
      throw ArgumentError("bond dimension mismatch between sites " + std::to_string(i) +
                          " and " + std::to_string(next));
    }
    if (!sites[i].all_finite()) throw ArgumentError("non-finite tensor entry");
  }
}

namespace {

int max_bond_of(const std::vector<SiteTensor>& sites) {
  int chi = 0;
  for (const auto& s : sites) chi = std::max({chi, s.left_dim(), s.right_dim()});
  return chi;
}

}  // namespace

Mps::Mps(std::vector<SiteTensor> sites)
    : n_sites_(static_cast<int>(sites.size())), ti_(false), sites_(std::move(sites)) {
  check_bonds(sites_, n_sites_, false);
  for (const auto& s : sites_) {
    if (s.phys_dim() != 2) throw ArgumentError("MPS sites must have phys_dim 2");
  }
}

Mps Mps::translation_invariant(SiteTensor site, int n_sites) {
  if (site.phys_dim() != 2) throw ArgumentError("MPS sites must have phys_dim 2");
  Mps out;
  out.n_sites_ = n_sites;
  out.ti_ = true;
  out.sites_.push_back(std::move(site));
  check_bonds(out.sites_, n_sites, true);
  return out;
}

int Mps::chi() const { return max_bond_of(sites_); }

Mpdo::Mpdo(std::vector<SiteTensor> sites, int kappa)
    : n_sites_(static_cast<int>(sites.size())), kappa_(kappa), ti_(false), sites_(std::move(sites)) {
  if (kappa < 1) throw ArgumentError("kappa must be positive");
  check_bonds(sites_, n_sites_, false);
  for (const auto& s : sites_) {
    if (s.phys_dim() != 2 * kappa) throw ArgumentError("MPDO sites must have 2*kappa slices");
  }
}

Mpdo Mpdo::translation_invariant(SiteTensor site, int kappa, int n_sites) {
  if (kappa < 1) throw ArgumentError("kappa must be positive");
  if (site.phys_dim() != 2 * kappa) throw ArgumentError("MPDO sites must have 2*kappa slices");
  Mpdo out;
  out.n_sites_ = n_sites;
  out.kappa_ = kappa;
  out.ti_ = true;
  out.sites_.push_back(std::move(site));
  check_bonds(out.sites_, n_sites, true);
  return out;
}

Mpdo Mpdo::from_mps(const Mps& mps) {
  Mpdo out;
  out.n_sites_ = mps.n_sites();
  out.kappa_ = 1;
  out.ti_ = mps.translationally_invariant();
  out.sites_ = mps.stored_sites();
  return out;
}

int Mpdo::chi() const { return max_bond_of(sites_); }

Mps Mpdo::to_mps() const {
  if (kappa_ != 1) throw ArgumentError("only kappa == 1 MPDOs are pure states");
  if (ti_) return Mps::translation_invariant(sites_[0], n_sites_);
  return Mps(sites_);
}

Mpo::Mpo(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {
  check_bonds(sites_, static_cast<int>(sites_.size()), false);
  for (const auto& s : sites_) {
    if (s.phys_dim() != 4) throw ArgumentError("MPO sites must have phys_dim 4");
  }
}

int Mpo::max_bond() const { return max_bond_of(sites_); }

}  // namespace mpstomo
