#include "mpstomo/metrics.hpp"

#include <cmath>

#include "mpstomo/contract.hpp"
#include "mpstomo/error.hpp"

namespace mpstomo {

namespace {

Mps as_mps(const State& s) {
  if (const auto* m = std::get_if<Mps>(&s)) return *m;
  if (const auto* m = std::get_if<Mpdo>(&s); m != nullptr && m->kappa() == 1) return m->to_mps();
  throw ArgumentError("fidelity_pure needs pure states");
}

struct Overlaps {
  double aa, bb, ab;
};

Overlaps overlaps(const State& a, const State& b) {
  if (n_sites(a) != n_sites(b)) throw ArgumentError("states have different site counts");
  const Mpo ma = to_mpo(a);
  const Mpo mb = to_mpo(b);
  const double ta = mpo_trace(ma).real();
  const double tb = mpo_trace(mb).real();
  if (!(ta > 0.0) || !(tb > 0.0)) throw IntegrityError("zero-norm state in distance metric");
  return {mpo_hs_inner(ma, ma).real() / (ta * ta), mpo_hs_inner(mb, mb).real() / (tb * tb),
          mpo_hs_inner(ma, mb).real() / (ta * tb)};
}

}  // namespace

double distance_r(const State& a, const State& b) {
  const Overlaps o = overlaps(a, b);
  return o.aa + o.bb - 2.0 * o.ab;
}

double distance_d(const State& model, const State& target) {
  const Overlaps o = overlaps(model, target);
  return (o.aa + o.bb - 2.0 * o.ab) / o.bb;
}

double fidelity_pure(const State& a, const State& b) {
  if (n_sites(a) != n_sites(b)) throw ArgumentError("states have different site counts");
  const Mps x = as_mps(a);
  const Mps y = as_mps(b);
  const double nx = mps_inner(x, x).real();
  const double ny = mps_inner(y, y).real();
  if (!(nx > 0.0) || !(ny > 0.0)) throw IntegrityError("zero-norm state in fidelity");
  return std::norm(mps_inner(x, y)) / (nx * ny);
}

Metrics compute_metrics(const State& model, const State& target) {
  const Overlaps o = overlaps(model, target);
  Metrics out;
  out.r = o.aa + o.bb - 2.0 * o.ab;
  out.d = out.r / o.bb;
  if (is_pure(model) && is_pure(target)) out.fidelity = fidelity_pure(model, target);
  return out;
}

}  // namespace mpstomo
