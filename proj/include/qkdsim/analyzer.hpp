#pragma once

#include <string>

namespace qkdsim {

/// A half-wave plate in front of a polarizing beam splitter. The plate at
/// angle theta rotates the transmitted polarization to 2*theta, so the "+"
/// port projects onto linear polarization 2*theta and the "-" port onto
/// 2*theta + 90 degrees.
class AnalyzerSetting {
 public:
  AnalyzerSetting() = default;

  /// Plate angle is reduced into [0, 180).
  static AnalyzerSetting from_hwp(double hwp_deg);
  static AnalyzerSetting from_polarization(double polarization_deg);

  double hwp_deg() const noexcept { return hwp_deg_; }
  double polarization_deg() const noexcept { return 2.0 * hwp_deg_; }
  double polarization_rad() const noexcept;

  /// Same analyzer with the ports exchanged (plate rotated by 45 degrees).
  AnalyzerSetting orthogonal() const;
  /// Mirror image about the H axis: polarization p -> -p.
  AnalyzerSetting reflected() const;

  /// True when both settings project onto the same "+" polarization
  /// (polarization angles equal modulo 180 degrees).
  bool same_projector(const AnalyzerSetting& other, double tol_deg = 1e-6) const noexcept;

  std::string describe() const;

 private:
  explicit AnalyzerSetting(double hwp_deg) : hwp_deg_(hwp_deg) {}
  double hwp_deg_ = 0.0;
};

}  // namespace qkdsim
