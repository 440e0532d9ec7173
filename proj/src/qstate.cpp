#include "qkdsim/qstate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "qkdsim/errors.hpp"

namespace qkdsim {

std::string_view to_string(BellLabel label) noexcept {
  switch (label) {
    case BellLabel::PhiPlus: return "PhiPlus";
    case BellLabel::PhiMinus: return "PhiMinus";
    case BellLabel::PsiPlus: return "PsiPlus";
    case BellLabel::PsiMinus: return "PsiMinus";
  }
  return "?";
}

BellLabel parse_bell_label(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c == '_' || c == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "phiplus" || key == "phi+") return BellLabel::PhiPlus;
  if (key == "phiminus" || key == "phi-") return BellLabel::PhiMinus;
  if (key == "psiplus" || key == "psi+") return BellLabel::PsiPlus;
  if (key == "psiminus" || key == "psi-" || key == "singlet") return BellLabel::PsiMinus;
  throw DomainError("unknown Bell state label '" + std::string(text) + "'");
}

PureTwoQubit PureTwoQubit::normalized(const Amplitudes& amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("pure state: zero or non-finite amplitude vector");
  return PureTwoQubit(amplitudes / norm);
}

TwoQubitState TwoQubitState::from_matrix(const DensityMatrix& rho) {
  TwoQubitState s(rho);
  s.validate();
  return s;
}

TwoQubitState TwoQubitState::maximally_mixed() {
  return TwoQubitState(DensityMatrix::Identity() / 4.0);
}

void TwoQubitState::validate() const {
  if (!rho_.allFinite()) throw InvariantError("density matrix has non-finite entries");
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) throw InvariantError("density matrix is not Hermitian");
  if (std::abs(rho_.trace().real() - 1.0) > kTraceTol || std::abs(rho_.trace().imag()) > kTraceTol) {
    throw InvariantError("density matrix trace differs from 1");
  }
  if (min_eigenvalue() < -kEigenTol) throw InvariantError("density matrix is not positive semidefinite");
}

double TwoQubitState::trace() const { return rho_.trace().real(); }

double TwoQubitState::purity() const { return (rho_ * rho_).trace().real(); }

double TwoQubitState::min_eigenvalue() const {
  // Symmetrize so the solver sees an exactly Hermitian input.
  const DensityMatrix h = (rho_ + rho_.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

PureTwoQubit bell_state(BellLabel label, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= std::numbers::pi / 2.0)) {
    throw DomainError("bell_state: epsilon must lie in [0, pi/2]");
  }
  const double c = std::cos(epsilon);
  const double s = std::sin(epsilon);
  Amplitudes a = Amplitudes::Zero();
  switch (label) {
    case BellLabel::PhiPlus: a(kHH) = c; a(kVV) = s; break;
    case BellLabel::PhiMinus: a(kHH) = c; a(kVV) = -s; break;
    case BellLabel::PsiPlus: a(kHV) = c; a(kVH) = s; break;
    case BellLabel::PsiMinus: a(kHV) = c; a(kVH) = -s; break;
  }
  return PureTwoQubit::normalized(a);
}

TwoQubitState to_density(const PureTwoQubit& psi) {
  const Amplitudes& a = psi.amplitudes();
  return TwoQubitState::unchecked(a * a.adjoint());
}

Eigen::Vector2d polarization_ket(const AnalyzerSetting& setting, bool plus_port) {
  const double p = setting.polarization_rad();
  if (plus_port) return {std::cos(p), std::sin(p)};
  return {-std::sin(p), std::cos(p)};
}

JointDistribution joint_probabilities(const TwoQubitState& state, const AnalyzerSetting& a,
                                      const AnalyzerSetting& b) {
  JointDistribution out;
  const DensityMatrix& rho = state.rho();
  for (int ia = 0; ia < 2; ++ia) {
    const Eigen::Vector2d ka = polarization_ket(a, ia == 0);
    for (int ib = 0; ib < 2; ++ib) {
      const Eigen::Vector2d kb = polarization_ket(b, ib == 0);
      Eigen::Vector4cd v;
      v << ka(0) * kb(0), ka(0) * kb(1), ka(1) * kb(0), ka(1) * kb(1);
      double p = (v.adjoint() * rho * v)(0, 0).real();
      if (p < -TwoQubitState::kEigenTol) {
        throw InvariantError("joint_probabilities: state yields a negative probability");
      }
      out.p[2 * ia + ib] = std::clamp(p, 0.0, 1.0);
    }
  }
  return out;
}

Eigen::Matrix4d swap_operator() {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(kHH, kHH) = 1.0;
  s(kVV, kVV) = 1.0;
  s(kHV, kVH) = 1.0;
  s(kVH, kHV) = 1.0;
  return s;
}

DensityMatrix kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  DensityMatrix out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Eigen::Matrix2cd reduce_to_b(const DensityMatrix& rho) {
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) += rho(2 * a + i, 2 * a + j);
  return r;
}

Eigen::Matrix2cd reduce_to_a(const DensityMatrix& rho) {
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) += rho(2 * i + b, 2 * j + b);
  return r;
}

}  // namespace qkdsim
