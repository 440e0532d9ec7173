#include "qkdsim/analyzer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qkdsim/errors.hpp"

namespace qkdsim {
namespace {

double wrap(double value, double period) {
  double r = std::fmod(value, period);
  if (r < 0.0) r += period;
  // fmod can return `period` itself after the shift for tiny negatives
  if (r >= period) r -= period;
  return r;
}

}  // namespace

AnalyzerSetting AnalyzerSetting::from_hwp(double hwp_deg) {
  if (!std::isfinite(hwp_deg)) throw DomainError("analyzer: plate angle must be finite");
  return AnalyzerSetting(wrap(hwp_deg, 180.0));
}

AnalyzerSetting AnalyzerSetting::from_polarization(double polarization_deg) {
  if (!std::isfinite(polarization_deg)) throw DomainError("analyzer: polarization angle must be finite");
  return AnalyzerSetting(wrap(polarization_deg, 180.0) / 2.0);
}

double AnalyzerSetting::polarization_rad() const noexcept {
  return polarization_deg() * std::numbers::pi / 180.0;
}

AnalyzerSetting AnalyzerSetting::orthogonal() const { return from_hwp(hwp_deg_ + 45.0); }

AnalyzerSetting AnalyzerSetting::reflected() const { return from_polarization(-polarization_deg()); }

bool AnalyzerSetting::same_projector(const AnalyzerSetting& other, double tol_deg) const noexcept {
  const double d = wrap(polarization_deg() - other.polarization_deg(), 180.0);
  return d <= tol_deg || 180.0 - d <= tol_deg;
}

std::string AnalyzerSetting::describe() const {
  std::ostringstream os;
  os << "hwp " << hwp_deg_ << " deg (pol " << polarization_deg() << " deg)";
  return os.str();
}

}  // namespace qkdsim
