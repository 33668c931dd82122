#include "mpstomo/sic.hpp"

#include <cmath>
#include <numbers>

#include "mpstomo/error.hpp"

namespace mpstomo {

namespace {

SicEffects from_vectors(const std::array<CVector, 4>& phi) {
  SicEffects sic;
  sic.phi = phi;
  for (int m = 0; m < 4; ++m) {
    sic.effects[m] = phi[m] * phi[m].adjoint();
    sic.weight[m] = phi[m].conjugate() * phi[m].transpose();
  }
  // The first two columns fix the qubit subspace; the last two complete the unitary.
  const double r2 = 1.0 / std::sqrt(2.0);
  const double r6 = 1.0 / std::sqrt(6.0);
  sic.u_sic = CMatrix::Zero(4, 4);
  for (int m = 0; m < 4; ++m) {
    sic.u_sic(m, 0) = std::conj(phi[m](0));
    sic.u_sic(m, 1) = std::conj(phi[m](1));
  }
  const double w = 2.0 * std::numbers::pi / 3.0;
  const cplx e = std::polar(1.0, w);
  sic.u_sic(0, 3) = r2;
  sic.u_sic(1, 2) = 1.0 / std::sqrt(3.0);
  sic.u_sic(2, 2) = e / std::sqrt(3.0);
  sic.u_sic(3, 2) = std::conj(e) / std::sqrt(3.0);
  sic.u_sic(1, 3) = -r6;
  sic.u_sic(2, 3) = -r6;
  sic.u_sic(3, 3) = -r6;
  return sic;
}

SicEffects build_standard() {
  const double w = 2.0 * std::numbers::pi / 3.0;
  std::array<CVector, 4> phi;
  for (auto& v : phi) v.resize(2);
  phi[0] << 1.0 / std::sqrt(2.0), 0.0;
  phi[1] << 1.0 / std::sqrt(6.0), 1.0 / std::sqrt(3.0);
  phi[2] << 1.0 / std::sqrt(6.0), std::polar(1.0 / std::sqrt(3.0), w);
  phi[3] << 1.0 / std::sqrt(6.0), std::polar(1.0 / std::sqrt(3.0), -w);
  return from_vectors(phi);
}

}  // namespace

const SicEffects& sic_effects() {
  static const SicEffects standard = build_standard();
  return standard;
}

SicEffects rotated_sic_effects(const CMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) throw ArgumentError("rotation must be 2x2");
  std::array<CVector, 4> phi;
  for (int m = 0; m < 4; ++m) phi[m] = u.adjoint() * sic_effects().phi[m];
  SicEffects out = from_vectors(phi);
  out.u_sic = sic_effects().u_sic;
  out.u_sic.leftCols(2) = out.u_sic.leftCols(2) * u;
  return out;
}

std::array<double, 4> single_qubit_probabilities(const CMatrix& rho, const SicEffects& sic) {
  if (rho.rows() != 2 || rho.cols() != 2) throw ArgumentError("single-qubit rho must be 2x2");
  std::array<double, 4> p{};
  for (int m = 0; m < 4; ++m) p[m] = (sic.effects[m] * rho).trace().real();
  return p;
}

}  // namespace mpstomo
