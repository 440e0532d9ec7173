#include "qkdsim/security.hpp"

#include <algorithm>
#include <cmath>

#include "qkdsim/errors.hpp"

namespace qkdsim {
namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p must lie in [0, 1]");
  return 0.0 - plogp(p) - plogp(1.0 - p);
}

EveInformation mi_alice_eve(double S) {
  if (!std::isfinite(S)) throw DomainError("mi_alice_eve: S must be finite");
  if (S > kTsirelson + 1e-12) throw DomainError("mi_alice_eve: S exceeds the Tsirelson bound 2 sqrt 2");
  if (S < 2.0) return {1.0, true};
  const double root = std::sqrt(std::clamp(S * S / 4.0 - 1.0, 0.0, 1.0));
  return {binary_entropy(std::clamp((1.0 + root) / 2.0, 0.0, 1.0)), false};
}

double mi_alice_bob(const JointDistribution& dist) {
  for (double p : dist.p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("mi_alice_bob: probabilities must lie in [0, 1]");
  }
  if (std::abs(dist.sum() - 1.0) > 1e-9) throw DomainError("mi_alice_bob: distribution is not normalized");
  const double pa_plus = dist.alice_plus();
  const double pb_plus = dist.bob_plus();
  // H(A|B) = -sum_b p(b) sum_a p(a|b) log p(a|b)
  double h_a_given_b = 0.0;
  for (int b = 0; b < 2; ++b) {
    const double pb = b == 0 ? pb_plus : 1.0 - pb_plus;
    if (pb <= 0.0) continue;
    for (int a = 0; a < 2; ++a) h_a_given_b -= pb * plogp(dist.p[2 * a + b] / pb);
  }
  return binary_entropy(std::clamp(pa_plus, 0.0, 1.0)) - h_a_given_b;
}

double mi_alice_bob(double e_b, double e_p) { return 1.0 - binary_entropy(e_b) - binary_entropy(e_p); }

double mi_alice_bob(const JointDistribution& bit_basis, const JointDistribution& phase_basis) {
  return mi_alice_bob(bit_basis) + mi_alice_bob(phase_basis) - 1.0;
}

double key_rate(double i_ab, double i_ae) { return i_ab - i_ae; }

double s_model(double delta) {
  if (!(delta >= 0.0 && delta <= 0.5)) throw DomainError("s_model: delta must lie in [0, 0.5]");
  return kTsirelson * (1.0 - 2.0 * delta);
}

double key_rate_model(double delta) {
  return key_rate(mi_alice_bob(delta, delta), mi_alice_eve(s_model(delta)).bits);
}

Thresholds thresholds() {
  Thresholds t;
  t.delta_individual = (1.0 - 1.0 / std::sqrt(2.0)) / 2.0;
  t.delta_collective = bisect([](double d) { return 1.0 - 2.0 * binary_entropy(d); }, 0.0, 0.5);
  t.delta_mi_zero = bisect(key_rate_model, 0.0, 0.25);
  t.S_at_collective = s_model(0.11);
  t.S_at_mi_zero = s_model(t.delta_mi_zero);
  return t;
}

SecurityReport assess(double e_b, double e_p, std::optional<double> measured_S) {
  static const Thresholds limits = thresholds();
  SecurityReport r;
  r.e_b = e_b;
  r.e_p = e_p;
  r.delta = 0.5 * (e_b + e_p);
  r.S_model = s_model(std::min(r.delta, 0.5));
  if (measured_S) {
    r.S_measured = true;
    r.S_clamped = *measured_S > kTsirelson;
    r.S_used = std::min(*measured_S, kTsirelson);
  } else {
    r.S_used = r.S_model;
  }
  const EveInformation eve = mi_alice_eve(r.S_used);
  r.sub_classical = eve.sub_classical;
  r.I_AB = mi_alice_bob(e_b, e_p);
  r.I_AE = eve.bits;
  r.r = key_rate(r.I_AB, r.I_AE);
  r.verdicts.individual_bound_ok = r.delta < limits.delta_individual;
  r.verdicts.collective_bound_ok = r.delta < limits.delta_collective;
  r.verdicts.mi_positive = r.r > 0.0;
  return r;
}

std::vector<MiCurvePoint> mi_curve(const std::vector<double>& deltas) {
  std::vector<MiCurvePoint> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    const double s = s_model(d);
    const double i_ab = mi_alice_bob(d, d);
    const double i_ae = mi_alice_eve(s).bits;
    out.push_back({d, s, i_ab, i_ae, key_rate(i_ab, i_ae)});
  }
  return out;
}

}  // namespace qkdsim
