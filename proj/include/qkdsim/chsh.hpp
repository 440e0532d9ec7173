#pragma once

#include <array>
#include <utility>

#include <Eigen/Dense>

#include "qkdsim/analyzer.hpp"
#include "qkdsim/measurement.hpp"
#include "qkdsim/qstate.hpp"

namespace qkdsim {

/// CHSH settings. S = sign * (E(a,b) - E(a,b') + E(a',b) + E(a',b')).
/// `sign` lets anticorrelated states report a positive violation.
struct ChshSettings {
  AnalyzerSetting a;
  AnalyzerSetting a_prime;
  AnalyzerSetting b;
  AnalyzerSetting b_prime;
  int sign = 1;

  /// Polarization angles a = 0, a' = 45, b = 22.5, b' = 67.5 degrees.
  /// PhiMinus and PsiPlus use Bob's mirror image (157.5, 112.5) so the
  /// correlators line up; Psi states take sign -1. Every maximal Bell state
  /// then reaches S = 2*sqrt(2).
  static ChshSettings canonical(BellLabel label);

  /// Order: (a,b), (a,b'), (a',b), (a',b').
  std::array<std::pair<AnalyzerSetting, AnalyzerSetting>, 4> pairs() const;
  void validate() const;
};

struct ChshEstimate {
  double S = 0.0;
  std::array<double, 4> E{};        // same order as ChshSettings::pairs()
  std::array<double, 4> sigma_E{};
  double sigma_S = 0.0;
};

double correlator_analytic(const TwoQubitState& state, const AnalyzerSetting& a, const AnalyzerSetting& b);

ChshEstimate s_analytic(const TwoQubitState& state, const ChshSettings& settings);

/// T_ij = Tr(rho sigma_i (x) sigma_j), i,j over {x, y, z}.
Eigen::Matrix3d correlation_matrix(const TwoQubitState& state);

struct OptimalChsh {
  /// 2 sqrt(m1 + m2), m1 >= m2 the two largest eigenvalues of T^T T.
  double s_max = 0.0;
  /// Best value reachable with linear-polarization analyzers (the x-z
  /// block of T), and settings achieving it.
  double s_linear = 0.0;
  ChshSettings linear_settings;
  ChshEstimate at_linear_settings;
};

OptimalChsh s_optimal(const TwoQubitState& state);

/// Correlators from counts with binomial errors sigma_E^2 = (1 - E^2) / n.
/// Throws IncompleteTableError naming missing setting pairs and
/// ValidationError for a row with zero total.
ChshEstimate s_from_counts(const CoincidenceTable& table, const ChshSettings& settings);

}  // namespace qkdsim
