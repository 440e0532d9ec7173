#pragma once

// Per-pair Monte-Carlo kernels. Work is cut into fixed-size chunks of
// emission slots; chunk c draws from its own generator seeded with
// derive_seed(seed, c). The serial and OpenMP variants therefore produce
// identical results for any thread count.

#include <array>
#include <cstdint>
#include <vector>

namespace qkdsim {

enum class Execution { Serial, Parallel };

inline constexpr std::uint64_t kChunkPairs = std::uint64_t{1} << 16;

struct OutcomeCounts {
  std::array<std::uint64_t, 4> n{};  // {++, +-, -+, --}

  std::uint64_t total() const noexcept { return n[0] + n[1] + n[2] + n[3]; }
  OutcomeCounts& operator+=(const OutcomeCounts& o) noexcept {
    for (int i = 0; i < 4; ++i) n[i] += o.n[i];
    return *this;
  }
  friend bool operator==(const OutcomeCounts&, const OutcomeCounts&) = default;
};

/// One detected coincidence.
struct PairEvent {
  std::uint64_t pair = 0;     // emission slot index
  std::uint8_t alice = 0;     // index into Alice's setting list
  std::uint8_t bob = 0;       // index into Bob's setting list
  std::uint8_t outcome = 0;   // Outcome code 0..3
  bool accidental = false;

  friend bool operator==(const PairEvent&, const PairEvent&) = default;
};

/// Flattened sampling tables. Branch 0 is the undisturbed pair; branch
/// 1 + 2*basis + k is "Eve measured `basis` and found k".
struct PairModel {
  int n_alice = 1;
  int n_bob = 1;
  double eta_a = 1.0;
  double eta_b = 1.0;
  double accidental_per_slot = 0.0;
  double eve_fraction = 0.0;
  std::array<double, 2> eve_plus_probability{0.5, 0.5};
  /// Cumulative outcome probabilities {P(++), P(++ or +-), P(not --)} per
  /// (branch, alice, bob), indexed branch * n_alice * n_bob + a * n_bob + b.
  std::vector<std::array<double, 3>> cdf;

  std::size_t index(int branch, int a, int b) const noexcept {
    return (static_cast<std::size_t>(branch) * n_alice + a) * n_bob + b;
  }
};

namespace kernels {

/// Outcome counts for a single-setting model (n_alice = n_bob = 1).
OutcomeCounts count_pairs_serial(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed);
OutcomeCounts count_pairs_parallel(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed);

/// All coincidences in slot order, with uniformly drawn setting indices.
std::vector<PairEvent> emit_events_serial(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed);
std::vector<PairEvent> emit_events_parallel(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed);

int max_threads() noexcept;

}  // namespace kernels

OutcomeCounts count_pairs(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed,
                          Execution exec);
std::vector<PairEvent> emit_events(const PairModel& model, std::uint64_t n_pairs,
                                   std::uint64_t seed, Execution exec);

}  // namespace qkdsim
