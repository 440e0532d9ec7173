// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qkdsim/chsh.hpp"
#include "qkdsim/ingest.hpp"
#include "qkdsim/optics.hpp"
#include "qkdsim/protocol.hpp"
#include "qkdsim/security.hpp"
#include "qkdsim/sweep.hpp"

using namespace qkdsim;
namespace fs = std::filesystem;

namespace {

struct Line {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

TwoQubitState from_oracle(const oracle::Mat4& m) {
  DensityMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m[i][j];
  return TwoQubitState::from_matrix(out);
}

Line criterion1() {
  SweepSpec spec;
  for (int i = 0; i <= 6; ++i) spec.grid.push_back(0.70 + 0.05 * i);
  spec.n_pairs = 100'000;
  spec.seed = 2024;
  const auto t0 = Clock::now();
  const auto rows = run_sweep(spec, Execution::Serial);
  const double elapsed = seconds_since(t0);

  double mx = 0, my = 0;
  for (const auto& r : rows) {
    mx += r.qber;
    my += r.S_sampled;
  }
  mx /= rows.size();
  my /= rows.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& r : rows) {
    sxx += (r.qber - mx) * (r.qber - mx);
    sxy += (r.qber - mx) * (r.S_sampled - my);
    syy += (r.S_sampled - my) * (r.S_sampled - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  const double r2 = sxy * sxy / (sxx * syy);
  const double want_slope = -4 * std::numbers::sqrt2;
  const bool ok = std::abs(slope / want_slope - 1) <= 0.05 && std::abs(intercept / kTsirelson - 1) <= 0.02 &&
                  r2 >= 0.99 && elapsed < 30.0;
  return {ok, fmt("slope %.4f (want %.4f +-5%%), intercept %.4f (want %.4f +-2%%), R^2 %.5f, %.2f s serial", slope,
                  want_slope, intercept, kTsirelson, r2, elapsed)};
}

Line criterion2() {
  const double s = s_model(0.02);
  return {std::abs(s - 2.64) < 0.12 && std::abs(s - 2.715) < 5e-4,
          fmt("s_model(0.02) = %.4f, |s - 2.64| = %.4f < 0.12", s, std::abs(s - 2.64))};
}

Line criterion3() {
  const auto t0 = Clock::now();
  const auto t = thresholds();
  const double elapsed = seconds_since(t0);
  const bool ind = std::abs(t.delta_individual - 0.1464) <= 1e-4;
  const bool col = std::abs(t.delta_collective - 0.1100) <= 5e-4;
  const bool mi = std::abs(t.delta_mi_zero - 0.0455) <= 5e-4;
  return {ind && col && mi && elapsed < 1.0,
          fmt("delta_individual %.6f [%s], delta_collective %.6f [%s], delta_mi_zero %.6f vs 0.0455+-5e-4 [%s], "
              "%.4f s",
              t.delta_individual, ind ? "ok" : "off", t.delta_collective, col ? "ok" : "off", t.delta_mi_zero,
              mi ? "ok" : "off", elapsed)};
}

Line criterion4() {
  std::vector<double> deltas;
  for (int i = 0; i <= 1000; ++i) deltas.push_back(i * 1e-4);
  const auto curve = mi_curve(deltas);
  bool monotone = true;
  int crossings = 0;
  double where = -1;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    monotone = monotone && curve[i].I_AB < curve[i - 1].I_AB && curve[i].I_AE > curve[i - 1].I_AE;
    if ((curve[i].I_AB > curve[i].I_AE) != (curve[i - 1].I_AB > curve[i - 1].I_AE)) {
      ++crossings;
      where = curve[i].delta;
    }
  }
  return {monotone && crossings == 1 && where > 0.04 && where < 0.05,
          fmt("monotone %s, %d crossing(s), first delta past crossing %.4f", monotone ? "yes" : "no", crossings,
              where)};
}

Line criterion5() {
  SessionConfig cfg;
  cfg.n_pairs = 1'000'000;
  cfg.channel = ChannelModel::intercept_resend(1.0);
  cfg.seed = 13;
  const auto rec = run_session(cfg);
  const auto sec = session_security(rec);
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(rec.disclosed_length));
  const double z = (rec.qber_hat - 0.25) / sigma;
  return {std::abs(z) <= 5.0 && sec.r < 0, fmt("QBER %.5f (%+.2f sigma from 0.25), r %.4f", rec.qber_hat, z, sec.r)};
}

Line criterion6() {
  const double grid_tol = 4.0 * kTsirelson * (1.0 - std::cos(2.0 * std::numbers::pi / 180.0));
  std::mt19937_64 rng(2024);
  double worst_grid = 0;
  bool grid_ok = true;
  for (int t = 0; t < 50; ++t) {
    const auto ref = oracle::random_real_state(rng);
    const double opt = s_optimal(from_oracle(ref)).s_linear;
    const double grid = oracle::grid_max_chsh(ref, 2.0);
    worst_grid = std::max(worst_grid, std::abs(opt - grid));
    grid_ok = grid_ok && grid <= opt + 1e-9 && opt - grid <= grid_tol;
  }

  double worst_counts = 0;
  const double n = 1e6;
  for (int l = 0; l < 4; ++l) {
    const auto label = static_cast<BellLabel>(l);
    const auto cs = ChshSettings::canonical(label);
    for (double w : {0.7, 0.85, 1.0}) {
      const auto s = from_oracle(oracle::werner(l, w));
      CoincidenceTable table;
      for (const auto& [a, b] : cs.pairs()) {
        const auto d = joint_probabilities(s, a, b);
        OutcomeCounts c;
        for (int o = 0; o < 4; ++o) c.n[o] = static_cast<std::uint64_t>(std::llround(n * d[o]));
        table.add({a, b, c, "expected"});
      }
      worst_counts = std::max(worst_counts, std::abs(s_from_counts(table, cs).S - s_analytic(s, cs).S));
    }
  }
  return {grid_ok && worst_counts < 1e-3,
          fmt("max |s_optimal - grid| %.2e (tolerance %.2e) on 50 states; max |S_counts - S_analytic| %.2e", worst_grid,
              grid_tol, worst_counts)};
}

Line criterion7() {
  const auto cs = ChshSettings::canonical(BellLabel::PhiPlus);
  SynthesisSpec spec;
  spec.state = apply_channel(generate(SourceModel{}), ChannelModel::werner(2.64 / kTsirelson));
  spec.det.efficiency = 1.0;
  spec.n_pairs_per_setting = 157;
  spec.mode = SynthesisMode::Poisson;
  int inside = 0;
  double mean_sigma = 0;
  for (int rep = 0; rep < 100; ++rep) {
    spec.seed = 1000 + rep;
    const auto text = write_counts(synthesize_counts(spec, cs, ProtocolKind::BBM92));
    const auto r = analyze_counts(parse_counts(text, "synthetic"), cs, ProtocolKind::BBM92);
    mean_sigma += r.chsh.sigma_S / 100;
    if (oracle::within_sigma(r.chsh.S, 2.64, r.chsh.sigma_S, 3.0)) ++inside;
  }
  return {inside >= 99, fmt("%d/100 within 3 sigma of 2.64, mean sigma_S %.4f", inside, mean_sigma)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("'") + QKDSIM_CLI + "' " + args + " > '" + out.string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Line criterion8() {
  const fs::path dir = fs::temp_directory_path() / ("qkdsim_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path configs = fs::path(QKDSIM_SOURCE_DIR) / "data" / "configs";
  const std::string sweep = "sweep --config '" + (configs / "werner_sweep.json").string() + "'";
  const std::string session = "session '" + (configs / "werner_086.json").string() + "' --emit-keys";
  bool ok = true;
  std::string detail;
  for (const auto& [name, args] : {std::pair{"sweep", sweep}, std::pair{"session", session}}) {
    const int c1 = run_cli(args, dir / "run1");
    const int c2 = run_cli(args, dir / "run2");
    const auto a = slurp(dir / "run1");
    const auto b = slurp(dir / "run2");
    const bool same = c1 == 0 && c2 == 0 && !a.empty() && a == b;
    ok = ok && same;
    detail += fmt("%s %s (%zu bytes); ", name, same ? "identical" : "DIFFERENT", a.size());
  }
  fs::remove_all(dir);
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Line criterion9() {
  SessionConfig cfg;
  cfg.n_pairs = 1'000'000;
  cfg.seed = 9;
  const auto bb = run_session(cfg);
  const double nb = static_cast<double>(bb.coincidences);
  const double zb = (bb.sifted_length / nb - 0.5) / std::sqrt(0.25 / nb);
  cfg.kind = ProtocolKind::E91;
  const auto e = run_session(cfg);
  const double ne = static_cast<double>(e.coincidences);
  const double p = 2.0 / 9.0;
  const double ze = (e.sifted_length / ne - p) / std::sqrt(p * (1 - p) / ne);
  return {std::abs(zb) <= 5 && std::abs(ze) <= 5,
          fmt("BBM92 sift %.5f (%+.2f sigma from 1/2), E91 key fraction %.5f (%+.2f sigma from 2/9)",
              bb.sifted_length / nb, zb, e.sifted_length / ne, ze)};
}

}  // namespace

int main() {
  Line (*const criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                               criterion6, criterion7, criterion8, criterion9};
  int failed = 0;
  for (int i = 0; i < 9; ++i) {
    Line o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
