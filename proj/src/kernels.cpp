#include "qkdsim/kernels.hpp"

#include <algorithm>

#include "qkdsim/seeding.hpp"

#ifdef QKDSIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace qkdsim::kernels {
namespace {

std::uint64_t chunk_count(std::uint64_t n_pairs) { return (n_pairs + kChunkPairs - 1) / kChunkPairs; }

int draw_index(Rng& rng, int n) {
  if (n == 1) return 0;
  return std::min(n - 1, static_cast<int>(unit_double(rng) * n));
}

int draw_outcome(const std::array<double, 3>& cdf, double u) {
  if (u < cdf[0]) return 0;
  if (u < cdf[1]) return 1;
  if (u < cdf[2]) return 2;
  return 3;
}

// Simulates slots [begin, end) and hands each coincidence to `sink`.
// The draw order per slot is fixed: settings, Eve, outcome, detections,
// accidental. Eve's draws are skipped entirely when eve_fraction is 0.
template <class Sink>
void run_chunk(const PairModel& m, std::uint64_t begin, std::uint64_t end, std::uint64_t chunk_seed,
               Sink&& sink) {
  Rng rng(chunk_seed);
  for (std::uint64_t slot = begin; slot < end; ++slot) {
    const int ia = draw_index(rng, m.n_alice);
    const int ib = draw_index(rng, m.n_bob);
    int branch = 0;
    if (m.eve_fraction > 0.0 && unit_double(rng) < m.eve_fraction) {
      const int basis = unit_double(rng) < 0.5 ? 0 : 1;
      const int k = unit_double(rng) < m.eve_plus_probability[basis] ? 0 : 1;
      branch = 1 + 2 * basis + k;
    }
    const int outcome = draw_outcome(m.cdf[m.index(branch, ia, ib)], unit_double(rng));
    const bool det_a = unit_double(rng) < m.eta_a;
    const bool det_b = unit_double(rng) < m.eta_b;
    if (det_a && det_b) {
      sink(PairEvent{slot, static_cast<std::uint8_t>(ia), static_cast<std::uint8_t>(ib),
                     static_cast<std::uint8_t>(outcome), false});
    } else if (m.accidental_per_slot > 0.0 && unit_double(rng) < m.accidental_per_slot) {
      const int noise = std::min(3, static_cast<int>(unit_double(rng) * 4.0));
      sink(PairEvent{slot, static_cast<std::uint8_t>(ia), static_cast<std::uint8_t>(ib),
                     static_cast<std::uint8_t>(noise), true});
    }
  }
}

OutcomeCounts count_chunk(const PairModel& m, std::uint64_t n_pairs, std::uint64_t seed, std::uint64_t c) {
  OutcomeCounts counts;
  const std::uint64_t begin = c * kChunkPairs;
  const std::uint64_t end = std::min(n_pairs, begin + kChunkPairs);
  run_chunk(m, begin, end, derive_seed(seed, c), [&](const PairEvent& e) { ++counts.n[e.outcome]; });
  return counts;
}

std::vector<PairEvent> events_chunk(const PairModel& m, std::uint64_t n_pairs, std::uint64_t seed,
                                    std::uint64_t c) {
  std::vector<PairEvent> events;
  const std::uint64_t begin = c * kChunkPairs;
  const std::uint64_t end = std::min(n_pairs, begin + kChunkPairs);
  events.reserve(static_cast<std::size_t>(static_cast<double>(end - begin) * m.eta_a * m.eta_b) + 16);
  run_chunk(m, begin, end, derive_seed(seed, c), [&](const PairEvent& e) { events.push_back(e); });
  return events;
}

std::vector<PairEvent> concatenate(std::vector<std::vector<PairEvent>>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<PairEvent> out;
  out.reserve(total);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

OutcomeCounts count_pairs_serial(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed) {
  OutcomeCounts total;
  for (std::uint64_t c = 0; c < chunk_count(n_pairs); ++c) total += count_chunk(model, n_pairs, seed, c);
  return total;
}

OutcomeCounts count_pairs_parallel(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed) {
  const auto chunks = static_cast<std::int64_t>(chunk_count(n_pairs));
  std::vector<OutcomeCounts> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < chunks; ++c) {
    parts[static_cast<std::size_t>(c)] = count_chunk(model, n_pairs, seed, static_cast<std::uint64_t>(c));
  }
  OutcomeCounts total;
  for (const auto& p : parts) total += p;
  return total;
}

std::vector<PairEvent> emit_events_serial(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed) {
  std::vector<std::vector<PairEvent>> parts;
  for (std::uint64_t c = 0; c < chunk_count(n_pairs); ++c) parts.push_back(events_chunk(model, n_pairs, seed, c));
  return concatenate(parts);
}

std::vector<PairEvent> emit_events_parallel(const PairModel& model, std::uint64_t n_pairs,
                                            std::uint64_t seed) {
  const auto chunks = static_cast<std::int64_t>(chunk_count(n_pairs));
  std::vector<std::vector<PairEvent>> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < chunks; ++c) {
    parts[static_cast<std::size_t>(c)] = events_chunk(model, n_pairs, seed, static_cast<std::uint64_t>(c));
  }
  return concatenate(parts);
}

int max_threads() noexcept {
#ifdef QKDSIM_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace qkdsim::kernels

namespace qkdsim {

OutcomeCounts count_pairs(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed, Execution exec) {
  return exec == Execution::Serial ? kernels::count_pairs_serial(model, n_pairs, seed)
                                   : kernels::count_pairs_parallel(model, n_pairs, seed);
}

std::vector<PairEvent> emit_events(const PairModel& model, std::uint64_t n_pairs, std::uint64_t seed,
                                   Execution exec) {
  return exec == Execution::Serial ? kernels::emit_events_serial(model, n_pairs, seed)
                                   : kernels::emit_events_parallel(model, n_pairs, seed);
}

}  // namespace qkdsim
