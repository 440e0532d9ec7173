// Serial vs OpenMP timings for the sampling kernels.
//
//   bench_kernels [n_pairs] [repeats]

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "qkdsim/measurement.hpp"
#include "qkdsim/optics.hpp"
#include "qkdsim/protocol.hpp"

using namespace qkdsim;

namespace {

template <class F>
double best_seconds(int repeats, F&& f) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, std::uint64_t n) {
  std::cout << std::left << std::setw(14) << name << std::right << std::fixed << std::setprecision(4)
            << std::setw(10) << serial << std::setw(10) << parallel << std::setw(8) << std::setprecision(2)
            << serial / parallel << std::setw(12) << std::setprecision(1) << n / serial / 1e6 << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4'000'000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

  const TwoQubitState state = apply_channel(generate(SourceModel{}), ChannelModel::werner(0.9));
  DetectorModel det;
  det.dark_rate = 1e-3;
  const auto a = AnalyzerSetting::from_hwp(0.0);
  const auto b = AnalyzerSetting::from_hwp(11.25);
  const PairModel single = build_pair_model(state, {a}, {b}, det, 0.0, false);
  const ProtocolBases bases = protocol_bases(ProtocolKind::E91, BellLabel::PhiPlus);
  const PairModel e91 = build_pair_model(state, bases.alice, bases.bob, det, 0.5, true);

  std::cout << "threads " << kernels::max_threads() << ", " << n << " pairs, best of " << repeats << "\n";
  std::cout << "kernel          serial  parallel speedup  Mpairs/s\n";
  std::uint64_t sink = 0;
  const double cs = best_seconds(repeats, [&] { sink += kernels::count_pairs_serial(single, n, 1).total(); });
  const double cp = best_seconds(repeats, [&] { sink += kernels::count_pairs_parallel(single, n, 1).total(); });
  row("count_pairs", cs, cp, n);
  const double es = best_seconds(repeats, [&] { sink += kernels::emit_events_serial(e91, n, 1).size(); });
  const double ep = best_seconds(repeats, [&] { sink += kernels::emit_events_parallel(e91, n, 1).size(); });
  row("emit_events", es, ep, n);
  return sink == 0 ? 1 : 0;
}
