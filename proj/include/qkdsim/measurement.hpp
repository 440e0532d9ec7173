#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkdsim/analyzer.hpp"
#include "qkdsim/kernels.hpp"
#include "qkdsim/qstate.hpp"

namespace qkdsim {

/// Detection model shared by Alice and Bob. A coincidence needs both photons
/// of the same emission slot to be detected; efficiency is applied i.i.d.
/// per arm. `dark_rate` is the expected number of accidental coincidences
/// per acquisition of `window_pairs` emitted pairs.
struct DetectorModel {
  double efficiency = 0.6;
  double dark_rate = 0.0;
  std::uint64_t window_pairs = 1;
  /// Bob's efficiency when it differs from Alice's.
  std::optional<double> efficiency_b;

  double eta_a() const noexcept { return efficiency; }
  double eta_b() const noexcept { return efficiency_b.value_or(efficiency); }
  /// Accidentals per emission slot.
  double accidentals_per_pair() const noexcept {
    return dark_rate / static_cast<double>(window_pairs);
  }
  void validate() const;
};

struct CoincidenceRow {
  AnalyzerSetting a;
  AnalyzerSetting b;
  OutcomeCounts counts;
  std::string duration_tag;
};

/// Counts per (Alice setting, Bob setting). Lookup is by projector, so the
/// same setting written as hwp theta or theta + 90 matches.
class CoincidenceTable {
 public:
  void add(CoincidenceRow row);
  const CoincidenceRow* find(const AnalyzerSetting& a, const AnalyzerSetting& b) const;
  const std::vector<CoincidenceRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  std::vector<CoincidenceRow> rows_;
};

/// Compiles a state, the per-party setting lists, detector and Eve fraction
/// into the lookup tables the sampling kernels consume.
PairModel build_pair_model(const TwoQubitState& state, const std::vector<AnalyzerSetting>& alice,
                           const std::vector<AnalyzerSetting>& bob, const DetectorModel& det,
                           double eve_fraction, bool slot_accidentals);

/// Coincidence counts for one setting pair: joint outcomes drawn per pair,
/// thinned by detection in both arms, plus Poisson(dark_rate * n / window)
/// accidentals spread uniformly over the four outcomes.
OutcomeCounts sample_outcomes(const TwoQubitState& state, const AnalyzerSetting& a,
                              const AnalyzerSetting& b, const DetectorModel& det,
                              std::uint64_t n_pairs, std::uint64_t seed,
                              Execution exec = Execution::Parallel);

/// As sample_outcomes, with Eve intercepting `eve_fraction` of Bob's photons.
/// eve_fraction = 0 reproduces sample_outcomes bit for bit.
OutcomeCounts sample_outcomes_intercepted(const TwoQubitState& state, const AnalyzerSetting& a,
                                          const AnalyzerSetting& b, const DetectorModel& det,
                                          std::uint64_t n_pairs, double eve_fraction,
                                          std::uint64_t seed,
                                          Execution exec = Execution::Parallel);

/// Per-pair coincidence stream under intercept-resend. For an intercepted
/// pair Eve measures Bob's photon in a random H/V or D/A basis and forwards
/// the eigenstate she found; Alice and Bob then measure the product state.
std::vector<PairEvent> intercept_resend(const TwoQubitState& state,
                                        const std::vector<AnalyzerSetting>& alice,
                                        const std::vector<AnalyzerSetting>& bob,
                                        const DetectorModel& det, std::uint64_t n_pairs,
                                        double eve_fraction, std::uint64_t seed,
                                        Execution exec = Execution::Parallel);

/// Accidental coincidences only: Poisson(mean) events, uniform over outcomes.
OutcomeCounts sample_accidentals(double mean, std::uint64_t seed);

}  // namespace qkdsim
