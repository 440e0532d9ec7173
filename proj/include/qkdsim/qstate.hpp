#pragma once

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "qkdsim/analyzer.hpp"

namespace qkdsim {

// Two-qubit polarization states. Qubit A is Alice's photon, qubit B Bob's.
// The product basis is ordered {HH, HV, VH, VV} everywhere (index 2*a + b
// with H = 0, V = 1).

using Amplitudes = Eigen::Vector4cd;
using DensityMatrix = Eigen::Matrix4cd;

inline constexpr int kHH = 0;
inline constexpr int kHV = 1;
inline constexpr int kVH = 2;
inline constexpr int kVV = 3;

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

std::string_view to_string(BellLabel label) noexcept;
/// Accepts "PhiPlus", "phi+", "Phi+" and similar spellings.
BellLabel parse_bell_label(std::string_view text);

/// Phi states carry |HH>,|VV> terms; Psi states |HV>,|VH>.
constexpr bool is_phi(BellLabel label) noexcept {
  return label == BellLabel::PhiPlus || label == BellLabel::PhiMinus;
}

class PureTwoQubit {
 public:
  /// Divides by the norm. Throws DomainError for a zero vector.
  static PureTwoQubit normalized(const Amplitudes& amplitudes);

  const Amplitudes& amplitudes() const noexcept { return amps_; }
  std::complex<double> operator[](int index) const { return amps_(index); }

 private:
  explicit PureTwoQubit(const Amplitudes& a) : amps_(a) {}
  Amplitudes amps_;
};

/// Density operator. The checked factory enforces Hermiticity, unit trace
/// and positive semidefiniteness; operations never renormalize silently.
class TwoQubitState {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kEigenTol = 1e-9;

  /// Throws InvariantError if `rho` is not a valid density operator.
  static TwoQubitState from_matrix(const DensityMatrix& rho);
  /// Skips validation. For intermediate results whose validity follows
  /// from construction; `validate()` can be called later.
  static TwoQubitState unchecked(const DensityMatrix& rho) { return TwoQubitState(rho); }
  static TwoQubitState maximally_mixed();

  const DensityMatrix& rho() const noexcept { return rho_; }
  std::complex<double> operator()(int row, int col) const { return rho_(row, col); }

  void validate() const;
  double trace() const;
  double purity() const;
  double min_eigenvalue() const;

 private:
  explicit TwoQubitState(const DensityMatrix& rho) : rho_(rho) {}
  DensityMatrix rho_;
};

enum Outcome : int { kPlusPlus = 0, kPlusMinus = 1, kMinusPlus = 2, kMinusMinus = 3 };

/// Joint detection probabilities for one pair of analyzer settings, ordered
/// {++, +-, -+, --} where "+" is transmission along the analyzer axis.
struct JointDistribution {
  std::array<double, 4> p{};

  double operator[](int outcome) const { return p[outcome]; }
  double sum() const { return p[0] + p[1] + p[2] + p[3]; }
  double correlator() const { return p[0] + p[3] - p[1] - p[2]; }
  double alice_plus() const { return p[0] + p[1]; }
  double bob_plus() const { return p[0] + p[2]; }
};

/// Bell state with amplitude imbalance epsilon: cos(eps)|first> +/- sin(eps)|second>.
/// Qubit A corresponds to output port 1, qubit B to port 2.
/// epsilon must lie in [0, pi/2]; pi/4 is the maximal case.
PureTwoQubit bell_state(BellLabel label, double epsilon);

TwoQubitState to_density(const PureTwoQubit& psi);

/// Tr(rho * Pi_a (x) Pi_b) for the four port combinations.
/// Throws InvariantError when the state yields a negative probability.
JointDistribution joint_probabilities(const TwoQubitState& state, const AnalyzerSetting& a,
                                      const AnalyzerSetting& b);

/// Linear polarization ket cos(p)|H> + sin(p)|V> for the chosen port.
Eigen::Vector2d polarization_ket(const AnalyzerSetting& setting, bool plus_port);

/// Operator exchanging the two qubits.
Eigen::Matrix4d swap_operator();

/// A (x) B for single-qubit operators, qubit A first.
DensityMatrix kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

/// Tr_A rho, a 2x2 operator on qubit B (and Tr_B for qubit A).
Eigen::Matrix2cd reduce_to_b(const DensityMatrix& rho);
Eigen::Matrix2cd reduce_to_a(const DensityMatrix& rho);

}  // namespace qkdsim
