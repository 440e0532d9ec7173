#pragma once

#include <optional>
#include <vector>

#include "qkdsim/qstate.hpp"

namespace qkdsim {

inline constexpr double kTsirelson = 2.8284271247461903;  // 2 sqrt(2)

/// H(p) = -p log2 p - (1-p) log2 (1-p), H(0) = H(1) = 0.
double binary_entropy(double p);

struct EveInformation {
  double bits = 0.0;
  /// S < 2: the square-root argument is negative and Eve's bound saturates at 1.
  bool sub_classical = false;
};

/// I(A:E) = H((1 + sqrt(S^2/4 - 1)) / 2). S > 2 sqrt 2 is a DomainError.
EveInformation mi_alice_eve(double S);

/// Shannon mutual information I(A:B) = H(A) - H(A|B) of one joint
/// distribution. Throws DomainError if the distribution is not normalized.
double mi_alice_bob(const JointDistribution& dist);
/// 1 - H(e_b) - H(e_p).
double mi_alice_bob(double e_b, double e_p);
/// Distribution route to 1 - H(e_b) - H(e_p): the information in the key
/// basis plus that in the conjugate basis, minus the one bit both share.
double mi_alice_bob(const JointDistribution& bit_basis, const JointDistribution& phase_basis);

/// r = I(A:B) - I(A:E).
double key_rate(double i_ab, double i_ae);

/// S = 2 sqrt 2 (1 - 2 delta), delta in [0, 0.5].
double s_model(double delta);

/// r(delta) = 1 - 2 H(delta) - I_AE(s_model(delta)).
double key_rate_model(double delta);

struct Thresholds {
  double delta_individual = 0.0;  // s_model(delta) = 2
  double delta_collective = 0.0;  // 1 - 2 H(delta) = 0
  double delta_mi_zero = 0.0;     // key_rate_model(delta) = 0
  double S_at_collective = 0.0;   // s_model(0.11)
  double S_at_mi_zero = 0.0;      // s_model(delta_mi_zero)
};

inline constexpr double kBisectionTolerance = 1e-6;

/// Bisection on a fixed bracket with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = kBisectionTolerance) {
  double f_lo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Thresholds thresholds();

struct SecurityVerdicts {
  bool individual_bound_ok = false;  // delta < delta_individual
  bool collective_bound_ok = false;  // delta < delta_collective
  bool mi_positive = false;          // r > 0
};

struct SecurityReport {
  double e_b = 0.0;
  double e_p = 0.0;
  double delta = 0.0;  // basis-averaged QBER
  double S_model = 0.0;
  /// S fed into I(A:E): measured when available, otherwise S_model.
  double S_used = 0.0;
  bool S_measured = false;
  /// Measured S above 2 sqrt 2 (statistical excursion) was clamped.
  bool S_clamped = false;
  bool sub_classical = false;
  double I_AB = 0.0;
  double I_AE = 0.0;
  double r = 0.0;
  SecurityVerdicts verdicts;
};

/// Builds the report from per-basis error rates. Negative I(A:B) and r are
/// reported as computed; only the mi_positive verdict requires r > 0.
SecurityReport assess(double e_b, double e_p, std::optional<double> measured_S = std::nullopt);

struct MiCurvePoint {
  double delta;
  double S;
  double I_AB;
  double I_AE;
  double r;
};
std::vector<MiCurvePoint> mi_curve(const std::vector<double>& deltas);

}  // namespace qkdsim
