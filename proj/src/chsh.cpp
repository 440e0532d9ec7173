#include "qkdsim/chsh.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qkdsim/errors.hpp"

namespace qkdsim {
namespace {

using C = std::complex<double>;

std::array<Eigen::Matrix2cd, 3> paulis() {
  Eigen::Matrix2cd x, y, z;
  x << 0, 1, 1, 0;
  y << 0, C(0, -1), C(0, 1), 0;
  z << 1, 0, 0, -1;
  return {x, y, z};
}

// Bloch direction (x, z) of a linear analyzer -> polarization angle in degrees.
AnalyzerSetting from_xz(const Eigen::Vector2d& v) {
  const double two_p = std::atan2(v(0), v(1));
  return AnalyzerSetting::from_polarization(two_p * 90.0 / std::numbers::pi);
}

}  // namespace

ChshSettings ChshSettings::canonical(BellLabel label) {
  const bool mirror = label == BellLabel::PhiMinus || label == BellLabel::PsiPlus;
  ChshSettings s;
  s.a = AnalyzerSetting::from_polarization(0.0);
  s.a_prime = AnalyzerSetting::from_polarization(45.0);
  s.b = AnalyzerSetting::from_polarization(mirror ? -22.5 : 22.5);
  s.b_prime = AnalyzerSetting::from_polarization(mirror ? -67.5 : 67.5);
  s.sign = is_phi(label) ? 1 : -1;
  return s;
}

std::array<std::pair<AnalyzerSetting, AnalyzerSetting>, 4> ChshSettings::pairs() const {
  return {{{a, b}, {a, b_prime}, {a_prime, b}, {a_prime, b_prime}}};
}

void ChshSettings::validate() const {
  if (a.same_projector(a_prime) || b.same_projector(b_prime)) {
    throw DomainError("CHSH settings: a/a' and b/b' must be distinct");
  }
  if (sign != 1 && sign != -1) throw DomainError("CHSH settings: sign must be +1 or -1");
}

double correlator_analytic(const TwoQubitState& state, const AnalyzerSetting& a, const AnalyzerSetting& b) {
  return std::clamp(joint_probabilities(state, a, b).correlator(), -1.0, 1.0);
}

ChshEstimate s_analytic(const TwoQubitState& state, const ChshSettings& settings) {
  settings.validate();
  ChshEstimate est;
  const auto p = settings.pairs();
  for (int i = 0; i < 4; ++i) est.E[i] = correlator_analytic(state, p[i].first, p[i].second);
  est.S = settings.sign * (est.E[0] - est.E[1] + est.E[2] + est.E[3]);
  return est;
}

Eigen::Matrix3d correlation_matrix(const TwoQubitState& state) {
  const auto s = paulis();
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (state.rho() * kron(s[i], s[j])).trace().real();
  return t;
}

OptimalChsh s_optimal(const TwoQubitState& state) {
  const Eigen::Matrix3d t = correlation_matrix(state);
  OptimalChsh out;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(t.transpose() * t, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d m = eig.eigenvalues();  // ascending
  out.s_max = 2.0 * std::sqrt(std::max(0.0, m(1) + m(2)));

  // Linear analyzers live in the x-z plane of the Bloch sphere.
  Eigen::Matrix2d txz;
  txz << t(0, 0), t(0, 2), t(2, 0), t(2, 2);
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(txz, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector2d sv = svd.singularValues();
  out.s_linear = 2.0 * std::hypot(sv(0), sv(1));

  // S = a'.T(b + b') + a.T(b - b'). Put b + b' along v1 and b - b' along v2,
  // a' along u1 and a along u2: S = 2 (cos(t) s1 + sin(t) s2), maximal at
  // tan(t) = s2 / s1.
  const double theta = std::atan2(sv(1), sv(0));
  const Eigen::Vector2d u1 = svd.matrixU().col(0), u2 = svd.matrixU().col(1);
  const Eigen::Vector2d v1 = svd.matrixV().col(0), v2 = svd.matrixV().col(1);
  ChshSettings s;
  s.a = from_xz(u2);
  s.a_prime = from_xz(u1);
  s.b = from_xz(std::cos(theta) * v1 + std::sin(theta) * v2);
  s.b_prime = from_xz(std::cos(theta) * v1 - std::sin(theta) * v2);
  s.sign = 1;
  out.linear_settings = s;
  // Degenerate correlations (e.g. I/4) can collapse the settings; evaluate
  // only when they form a proper CHSH set.
  if (!s.a.same_projector(s.a_prime) && !s.b.same_projector(s.b_prime)) {
    out.at_linear_settings = s_analytic(state, s);
  }
  return out;
}

ChshEstimate s_from_counts(const CoincidenceTable& table, const ChshSettings& settings) {
  settings.validate();
  const auto p = settings.pairs();
  std::vector<std::string> missing;
  std::array<const CoincidenceRow*, 4> rows{};
  for (int i = 0; i < 4; ++i) {
    rows[i] = table.find(p[i].first, p[i].second);
    if (rows[i] == nullptr) {
      missing.push_back("(" + std::to_string(p[i].first.polarization_deg()) + ", " +
                        std::to_string(p[i].second.polarization_deg()) + ")");
    }
  }
  if (!missing.empty()) {
    std::string msg = "incomplete table: missing setting pair(s) (polarization deg)";
    for (const auto& m : missing) msg += " " + m;
    throw IncompleteTableError(msg, missing);
  }

  ChshEstimate est;
  double var_s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto& n = rows[i]->counts.n;
    const double total = static_cast<double>(rows[i]->counts.total());
    if (total <= 0.0) {
      throw ValidationError("zero-total row at " + p[i].first.describe() + " / " + p[i].second.describe());
    }
    const double e = (static_cast<double>(n[0]) + static_cast<double>(n[3]) - static_cast<double>(n[1]) -
                      static_cast<double>(n[2])) / total;
    est.E[i] = e;
    est.sigma_E[i] = std::sqrt(std::max(0.0, 1.0 - e * e) / total);
    var_s += est.sigma_E[i] * est.sigma_E[i];
  }
  est.S = settings.sign * (est.E[0] - est.E[1] + est.E[2] + est.E[3]);
  est.sigma_S = std::sqrt(var_s);
  return est;
}

}  // namespace qkdsim
