#include "mpstomo/parameters.hpp"

#include <cmath>

#include "mpstomo/error.hpp"

namespace mpstomo {

Mpdo expand_ti(const Mpdo& m) {
  if (!m.translationally_invariant()) return m;
  std::vector<SiteTensor> sites(m.n_sites(), m.site(0));
  return Mpdo(std::move(sites), m.kappa());
}

namespace {

Mpdo as_mpdo(const State& s) {
  if (const auto* m = std::get_if<Mps>(&s)) return Mpdo::from_mps(*m);
  if (const auto* m = std::get_if<Mpdo>(&s)) return *m;
  throw ArgumentError("a model anchor must be an MPS or an MPDO, not a bare MPO");
}

bool all_sites_equal(const Mpdo& m) {
  for (int i = 1; i < m.n_sites(); ++i) {
    if (!(m.site(i) == m.site(0))) return false;
  }
  return true;
}

}  // namespace

ModelSpec make_model(const State& anchor, Realness realness, bool ti, bool diagonal_only, bool phase_only) {
  ModelSpec spec;
  spec.realness = realness;
  spec.ti = ti;
  spec.diagonal_only = diagonal_only;
  spec.phase_only = phase_only;
  Mpdo m = as_mpdo(anchor);
  if (ti && !m.translationally_invariant()) {
    if (!all_sites_equal(m)) throw ArgumentError("a TI model needs a translation-invariant target");
    m = Mpdo::translation_invariant(m.site(0), m.kappa(), m.n_sites());
  }
  if (!ti) m = expand_ti(m);
  if (realness == Realness::real && !phase_only) {
    for (const auto& t : m.stored_sites()) {
      for (const auto& slice : t.slices()) {
        if (slice.imag().cwiseAbs().maxCoeff() > 0.0) {
          throw ArgumentError("a real model cannot be anchored at a complex target");
        }
      }
    }
  }
  if (diagonal_only) {
    for (const auto& t : m.stored_sites()) {
      for (const auto& slice : t.slices()) {
        CMatrix off = slice;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > 0.0) throw ArgumentError("diagonal model needs a diagonal target");
      }
    }
  }
  spec.anchor = std::move(m);
  return spec;
}

ModelSpec with_anchor(const ModelSpec& spec, Mpdo anchor) {
  const Mpdo& old = spec.anchor;
  if (anchor.n_sites() != old.n_sites() || anchor.kappa() != old.kappa() ||
      anchor.translationally_invariant() != old.translationally_invariant() ||
      anchor.stored_sites().size() != old.stored_sites().size()) {
    throw ArgumentError("new anchor does not match the model shape");
  }
  ModelSpec out = spec;
  out.anchor = std::move(anchor);
  return out;
}

std::vector<ParameterIndex> parameter_table(const ModelSpec& spec) {
  std::vector<ParameterIndex> table;
  const auto& stored = spec.anchor.stored_sites();
  const bool complex = spec.realness == Realness::complex;
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const SiteTensor& t = stored[i];
    for (int k = 0; k < spec.kappa(); ++k) {
      for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < t.left_dim(); ++a) {
          for (int b = 0; b < t.right_dim(); ++b) {
            if (spec.diagonal_only && a != b) continue;
            ParameterIndex p;
            p.site = spec.ti ? ParameterIndex::kSharedSite : static_cast<int>(i);
            p.j = a * t.right_dim() + b;
            p.k = k;
            p.s = s;
            p.row = a;
            p.col = b;
            if (spec.phase_only) {
              if (std::abs(t[k * 2 + s](a, b)) == 0.0) continue;
              p.part = Part::phase;
              table.push_back(p);
              continue;
            }
            p.part = Part::real;
            table.push_back(p);
            if (complex) {
              p.part = Part::imag;
              table.push_back(p);
            }
          }
        }
      }
    }
  }
  return table;
}

RVector pack(const std::vector<ParameterIndex>& table, const Mpdo& state) {
  RVector theta(static_cast<Eigen::Index>(table.size()));
  for (std::size_t a = 0; a < table.size(); ++a) {
    const auto& p = table[a];
    const cplx z = state.stored_sites()[p.stored_site()][p.slice()](p.row, p.col);
    switch (p.part) {
      case Part::real: theta[a] = z.real(); break;
      case Part::imag: theta[a] = z.imag(); break;
      case Part::phase: theta[a] = std::arg(z); break;
    }
  }
  return theta;
}

Mpdo unpack(const std::vector<ParameterIndex>& table, const RVector& theta, const Mpdo& base) {
  if (theta.size() != static_cast<Eigen::Index>(table.size())) {
    throw ArgumentError("parameter vector length does not match the table");
  }
  Mpdo out = base;
  for (std::size_t a = 0; a < table.size(); ++a) {
    const auto& p = table[a];
    cplx& z = out.stored_sites()[p.stored_site()][p.slice()](p.row, p.col);
    switch (p.part) {
      case Part::real: z = cplx(theta[a], z.imag()); break;
      case Part::imag: z = cplx(z.real(), theta[a]); break;
      case Part::phase: z = std::polar(std::abs(z), theta[a]); break;
    }
  }
  return out;
}

CVector parameter_directions(const std::vector<ParameterIndex>& table, const Mpdo& state) {
  CVector c(static_cast<Eigen::Index>(table.size()));
  for (std::size_t a = 0; a < table.size(); ++a) {
    const auto& p = table[a];
    switch (p.part) {
      case Part::real: c[a] = 1.0; break;
      case Part::imag: c[a] = cplx(0.0, 1.0); break;
      case Part::phase:
        c[a] = cplx(0.0, 1.0) * state.stored_sites()[p.stored_site()][p.slice()](p.row, p.col);
        break;
    }
  }
  return c;
}

TensorGrad zero_grad(const Mpdo& state) {
  TensorGrad g;
  for (const auto& t : state.stored_sites()) g.emplace_back(t.phys_dim(), t.left_dim(), t.right_dim());
  return g;
}

RVector project(const std::vector<ParameterIndex>& table, const CVector& directions, const TensorGrad& grad) {
  RVector out(static_cast<Eigen::Index>(table.size()));
  for (std::size_t a = 0; a < table.size(); ++a) {
    const auto& p = table[a];
    out[a] = 2.0 * (directions[a] * grad[p.stored_site()][p.slice()](p.row, p.col)).real();
  }
  return out;
}

Mpdo random_model(int n_sites, int chi, int kappa, bool ti, Realness realness, bool diagonal_only,
                  double scale, Rng& rng) {
  if (n_sites < 1 || chi < 1 || kappa < 1) throw ArgumentError("model dimensions must be positive");
  const int stored = ti ? 1 : n_sites;
  std::vector<SiteTensor> sites;
  for (int i = 0; i < stored; ++i) {
    SiteTensor t(2 * kappa, chi, chi);
    for (int p = 0; p < t.phys_dim(); ++p) {
      for (int a = 0; a < chi; ++a) {
        for (int b = 0; b < chi; ++b) {
          const double re = rng.uniform(-scale, scale);
          const double im = realness == Realness::complex ? rng.uniform(-scale, scale) : 0.0;
          t[p](a, b) = (diagonal_only && a != b) ? cplx(0.0) : cplx(re, im);
        }
      }
    }
    sites.push_back(std::move(t));
  }
  if (ti) return Mpdo::translation_invariant(std::move(sites[0]), kappa, n_sites);
  return Mpdo(std::move(sites), kappa);
}

}  // namespace mpstomo
