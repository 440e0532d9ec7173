#include "qkdsim/measurement.hpp"

#include <cmath>
#include <random>

#include "qkdsim/errors.hpp"
#include "qkdsim/optics.hpp"
#include "qkdsim/seeding.hpp"

namespace qkdsim {
namespace {

std::array<double, 3> cumulative(const JointDistribution& d) {
  return {d.p[0], d.p[0] + d.p[1], d.p[0] + d.p[1] + d.p[2]};
}

}  // namespace

void DetectorModel::validate() const {
  auto check_eta = [](double eta, const char* what) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError(std::string("detector: ") + what + " must lie in (0, 1]");
  };
  check_eta(efficiency, "efficiency");
  if (efficiency_b) check_eta(*efficiency_b, "efficiency_b");
  if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) throw DomainError("detector: dark_rate must be >= 0");
  if (window_pairs < 1) throw DomainError("detector: window_pairs must be >= 1");
}

void CoincidenceTable::add(CoincidenceRow row) { rows_.push_back(std::move(row)); }

const CoincidenceRow* CoincidenceTable::find(const AnalyzerSetting& a, const AnalyzerSetting& b) const {
  for (const auto& row : rows_) {
    if (row.a.same_projector(a) && row.b.same_projector(b)) return &row;
  }
  return nullptr;
}

PairModel build_pair_model(const TwoQubitState& state, const std::vector<AnalyzerSetting>& alice,
                           const std::vector<AnalyzerSetting>& bob, const DetectorModel& det,
                           double eve_fraction, bool slot_accidentals) {
  det.validate();
  if (alice.empty() || bob.empty() || alice.size() > 255 || bob.size() > 255) {
    throw DomainError("pair model: setting lists must hold 1..255 entries");
  }
  if (!(eve_fraction >= 0.0 && eve_fraction <= 1.0)) throw DomainError("pair model: eve_fraction must lie in [0, 1]");

  PairModel m;
  m.n_alice = static_cast<int>(alice.size());
  m.n_bob = static_cast<int>(bob.size());
  m.eta_a = det.eta_a();
  m.eta_b = det.eta_b();
  m.accidental_per_slot = slot_accidentals ? std::min(1.0, det.accidentals_per_pair()) : 0.0;
  m.eve_fraction = eve_fraction;

  std::vector<TwoQubitState> branches{state};
  const auto bases = eve_bases();
  for (int basis = 0; basis < 2; ++basis) {
    const auto split = intercept_branches(state, bases[basis]);
    m.eve_plus_probability[basis] = split[0].probability;
    branches.push_back(split[0].state);
    branches.push_back(split[1].state);
  }
  m.cdf.resize(branches.size() * alice.size() * bob.size());
  for (int br = 0; br < static_cast<int>(branches.size()); ++br)
    for (int a = 0; a < m.n_alice; ++a)
      for (int b = 0; b < m.n_bob; ++b)
        m.cdf[m.index(br, a, b)] = cumulative(joint_probabilities(branches[br], alice[a], bob[b]));
  return m;
}

OutcomeCounts sample_accidentals(double mean, std::uint64_t seed) {
  OutcomeCounts counts;
  if (!(mean > 0.0)) return counts;
  Rng rng(seed);
  std::poisson_distribution<std::uint64_t> poisson(mean);
  const std::uint64_t n = poisson(rng);
  for (std::uint64_t i = 0; i < n; ++i) ++counts.n[std::min(3, static_cast<int>(unit_double(rng) * 4.0))];
  return counts;
}

OutcomeCounts sample_outcomes_intercepted(const TwoQubitState& state, const AnalyzerSetting& a,
                                          const AnalyzerSetting& b, const DetectorModel& det,
                                          std::uint64_t n_pairs, double eve_fraction, std::uint64_t seed,
                                          Execution exec) {
  if (n_pairs < 1) throw DomainError("sample_outcomes: n_pairs must be >= 1");
  const PairModel model = build_pair_model(state, {a}, {b}, det, eve_fraction, false);
  OutcomeCounts counts = count_pairs(model, n_pairs, derive_seed(seed, 0), exec);
  counts += sample_accidentals(det.accidentals_per_pair() * static_cast<double>(n_pairs), derive_seed(seed, 1));
  return counts;
}

OutcomeCounts sample_outcomes(const TwoQubitState& state, const AnalyzerSetting& a, const AnalyzerSetting& b,
                              const DetectorModel& det, std::uint64_t n_pairs, std::uint64_t seed,
                              Execution exec) {
  return sample_outcomes_intercepted(state, a, b, det, n_pairs, 0.0, seed, exec);
}

std::vector<PairEvent> intercept_resend(const TwoQubitState& state, const std::vector<AnalyzerSetting>& alice,
                                        const std::vector<AnalyzerSetting>& bob, const DetectorModel& det,
                                        std::uint64_t n_pairs, double eve_fraction, std::uint64_t seed,
                                        Execution exec) {
  const PairModel model = build_pair_model(state, alice, bob, det, eve_fraction, true);
  return emit_events(model, n_pairs, seed, exec);
}

}  // namespace qkdsim
