#include "mpstomo/probability.hpp"

#include <cmath>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"

namespace mpstomo {

Outcome parse_outcome(const std::string& quarts) {
  Outcome out(quarts.size());
  for (std::size_t i = 0; i < quarts.size(); ++i) {
    const char c = quarts[i];
    if (c < '0' || c > '3') {
      throw ArgumentError("invalid outcome symbol '" + std::string(1, c) + "' in '" + quarts + "'");
    }
    out[i] = static_cast<std::uint8_t>(c - '0');
  }
  return out;
}

std::string format_outcome(std::span<const std::uint8_t> outcome) {
  std::string s(outcome.size(), '0');
  for (std::size_t i = 0; i < outcome.size(); ++i) s[i] = static_cast<char>('0' + outcome[i]);
  return s;
}

namespace {

double rescale(CMatrix& m) {
  const double norm = m.cwiseAbs().maxCoeff();
  if (norm > 0.0 && std::isfinite(norm)) {
    m /= norm;
    return std::log(norm);
  }
  return 0.0;
}

void check_symbols(std::span<const std::uint8_t> m) {
  for (auto v : m) {
    if (v > 3) throw ArgumentError("outcome symbols must be 0..3");
  }
}

}  // namespace

ProbabilityMpo::ProbabilityMpo(const State& state, const SicEffects& sic)
    : clamps_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  const Mpo mpo = to_mpo(state);
  n_ = mpo.n_sites();
  pure_ = is_pure(state);
  b_.resize(n_);
  marginal_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    const SiteTensor& a = mpo.site(i);
    for (int m = 0; m < 4; ++m) {
      CMatrix acc = CMatrix::Zero(a.left_dim(), a.right_dim());
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) acc += sic.weight[m](s, sp) * a[s * 2 + sp];
      }
      b_[i][m] = std::move(acc);
    }
    marginal_[i] = a[0] + a[3];
  }
  if (pure_) {
    const Mps mps = std::holds_alternative<Mps>(state) ? std::get<Mps>(state)
                                                        : std::get<Mpdo>(state).to_mps();
    f_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const SiteTensor& c = mps.site(i);
      for (int m = 0; m < 4; ++m) {
        f_[i][m] = std::conj(sic.phi[m](0)) * c[0] + std::conj(sic.phi[m](1)) * c[1];
      }
    }
  }

  const Eigen::Index d0 = marginal_[0].rows();
  suffix_.resize(n_ + 1);
  suffix_log_scale_.assign(n_ + 1, 0.0);
  suffix_[n_] = CMatrix::Identity(d0, d0);
  for (int i = n_ - 1; i >= 0; --i) {
    suffix_[i] = marginal_[i] * suffix_[i + 1];
    suffix_log_scale_[i] = suffix_log_scale_[i + 1] + rescale(suffix_[i]);
  }
  trace_ = suffix_[0].trace().real() * std::exp(suffix_log_scale_[0]);
  if (!std::isfinite(trace_)) throw IntegrityError("Tr(rho) is not finite");
}

double ProbabilityMpo::clamp(double p, std::span<const std::uint8_t> m) const {
  if (p >= 0.0) return p;
  if (p >= -kNegativeFloor * std::abs(trace_)) {
    clamps_->fetch_add(1);
    return 0.0;
  }
  throw IntegrityError("negative outcome probability " + std::to_string(p) + " for m=" +
                       format_outcome(m));
}

double ProbabilityMpo::outcome_probability(std::span<const std::uint8_t> m) const {
  if (static_cast<int>(m.size()) != n_) {
    throw ArgumentError("outcome length " + std::to_string(m.size()) + " does not match " +
                        std::to_string(n_) + " sites");
  }
  check_symbols(m);
  double log_scale = 0.0;
  if (pure_) {
    CMatrix acc = f_[0][m[0]];
    for (int i = 1; i < n_; ++i) {
      acc = acc * f_[i][m[i]];
      log_scale += rescale(acc);
    }
    return std::norm(acc.trace()) * std::exp(2.0 * log_scale);
  }
  CMatrix acc = b_[0][m[0]];
  for (int i = 1; i < n_; ++i) {
    acc = acc * b_[i][m[i]];
    log_scale += rescale(acc);
  }
  return clamp(acc.trace().real() * std::exp(log_scale), m);
}

double ProbabilityMpo::outcome_probability(const std::string& m) const {
  return outcome_probability(parse_outcome(m));
}

ConditionalValues ProbabilityMpo::conditional_distribution(std::span<const std::uint8_t> prefix) const {
  const int i = static_cast<int>(prefix.size());
  if (i >= n_) throw ArgumentError("prefix must be shorter than the chain");
  check_symbols(prefix);
  const Eigen::Index d0 = suffix_[n_].rows();
  CMatrix left = CMatrix::Identity(d0, d0);
  double log_left = 0.0;
  for (int j = 0; j < i; ++j) {
    left = left * b_[j][prefix[j]];
    log_left += rescale(left);
  }
  const CMatrix w = suffix_[i + 1] * left;
  const double scale = std::exp(log_left + suffix_log_scale_[i + 1]);
  ConditionalValues out;
  double total = 0.0;
  for (int m = 0; m < 4; ++m) {
    const double v = (b_[i][m].array() * w.transpose().array()).sum().real() * scale;
    out.raw[m] = v;
    total += v;
  }
  if (!(total > 0.0)) throw IntegrityError("conditional chain has non-positive total");
  for (int m = 0; m < 4; ++m) out.normalized[m] = out.raw[m] / total;
  return out;
}

ConditionalValues ProbabilityMpo::conditional_distribution(const std::string& prefix) const {
  return conditional_distribution(parse_outcome(prefix));
}

int ProbabilityMpo::step(int site, CMatrix& left, double uniform) const {
  const CMatrix w = suffix_[site + 1] * left;
  std::array<double, 4> v{};
  double total = 0.0;
  for (int m = 0; m < 4; ++m) {
    v[m] = std::max(0.0, (b_[site][m].array() * w.transpose().array()).sum().real());
    total += v[m];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw IntegrityError("sampling reached a zero-probability prefix at site " + std::to_string(site));
  }
  const double target = uniform * total;
  int chosen = 3;
  double acc = 0.0;
  for (int m = 0; m < 4; ++m) {
    acc += v[m];
    if (target < acc && v[m] > 0.0) {
      chosen = m;
      break;
    }
  }
  while (v[chosen] <= 0.0) --chosen;
  left = left * b_[site][chosen];
  rescale(left);
  return chosen;
}

std::vector<double> dense_outcome_probabilities(const CMatrix& rho, int n_sites, const SicEffects& sic) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  if (rho.rows() != dim || rho.cols() != dim) throw ArgumentError("rho has the wrong dimension");
  if (n_sites > kDenseMatrixMaxSites) throw GuardError("dense outcome enumeration refused");
  const std::size_t total = std::size_t{1} << (2 * n_sites);
  std::vector<cplx> v(total);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      std::size_t idx = 0;
      for (int i = 0; i < n_sites; ++i) {
        idx = idx * 4 + ((r >> (n_sites - 1 - i)) & 1) * 2 + ((c >> (n_sites - 1 - i)) & 1);
      }
      v[idx] = rho(r, c);
    }
  }
  for (int i = 0; i < n_sites; ++i) {
    const std::size_t stride = std::size_t{1} << (2 * (n_sites - 1 - i));
    for (std::size_t base = 0; base < total; base += 4 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        std::array<cplx, 4> in{};
        for (int p = 0; p < 4; ++p) in[p] = v[base + p * stride + off];
        for (int m = 0; m < 4; ++m) {
          cplx acc = 0.0;
          for (int p = 0; p < 4; ++p) acc += sic.weight[m](p / 2, p % 2) * in[p];
          v[base + m * stride + off] = acc;
        }
      }
    }
  }
  std::vector<double> out(total);
  for (std::size_t k = 0; k < total; ++k) out[k] = v[k].real();
  return out;
}

}  // namespace mpstomo
