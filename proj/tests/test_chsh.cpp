#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qkdsim/chsh.hpp"
#include "qkdsim/errors.hpp"
#include "qkdsim/optics.hpp"

using namespace qkdsim;
using doctest::Approx;

namespace {

constexpr BellLabel kLabels[] = {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

TwoQubitState from_oracle(const oracle::Mat4& m) {
  DensityMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m[i][j];
  return TwoQubitState::from_matrix(out);
}

// Rounded expectation counts for the four CHSH setting pairs.
CoincidenceTable expected_table(const TwoQubitState& s, const ChshSettings& cs, double n) {
  CoincidenceTable t;
  for (const auto& [a, b] : cs.pairs()) {
    const auto d = joint_probabilities(s, a, b);
    OutcomeCounts c;
    for (int o = 0; o < 4; ++o) c.n[o] = static_cast<std::uint64_t>(std::llround(n * d[o]));
    t.add({a, b, c, "expected"});
  }
  return t;
}

// Loss from snapping each of the four analyzers to a 2 degree grid: at most
// 1 degree in polarization, 2 degrees on the Bloch circle.
const double kGridTolerance = 4.0 * oracle::kTsirelson * (1.0 - std::cos(2.0 * std::numbers::pi / 180.0));

}  // namespace

TEST_CASE("canonical settings give 2 sqrt 2 on all four maximal Bell states") {
  for (BellLabel l : kLabels) {
    SourceModel src;
    src.label = l;
    CHECK(s_analytic(generate(src), ChshSettings::canonical(l)).S == Approx(oracle::kTsirelson));
  }
}

TEST_CASE("Werner states give S = 2 sqrt 2 W") {
  for (int l = 0; l < 4; ++l) {
    for (double w : {0.5, 0.78, 0.9, 1.0}) {
      const auto s = from_oracle(oracle::werner(l, w));
      CHECK(s_analytic(s, ChshSettings::canonical(kLabels[l])).S == Approx(oracle::kTsirelson * w));
    }
  }
}

TEST_CASE("amplitude imbalance at canonical settings gives sqrt 2 (1 + sin 2 eps)") {
  for (double eps : {0.1, 0.4, std::numbers::pi / 6, std::numbers::pi / 4}) {
    SourceModel src;
    src.epsilon = eps;
    const auto s = generate(src);
    CHECK(s_analytic(s, ChshSettings::canonical(BellLabel::PhiPlus)).S ==
          Approx(oracle::kSqrt2 * (1 + std::sin(2 * eps))));
  }
  // optimized settings do better: 2 sqrt(1 + sin^2 2 eps)
  SourceModel src;
  src.epsilon = std::numbers::pi / 6;
  const auto opt = s_optimal(generate(src));
  CHECK(opt.s_max == Approx(oracle::frozen::S_max_eps_pi6));
  CHECK(opt.s_linear == Approx(oracle::frozen::S_max_eps_pi6));
}

TEST_CASE("correlators agree with the oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(0, 180);
  for (int t = 0; t < 100; ++t) {
    const auto ref = oracle::random_density(rng);
    const auto s = from_oracle(ref);
    const auto a = AnalyzerSetting::from_polarization(angle(rng));
    const auto b = AnalyzerSetting::from_polarization(angle(rng));
    CHECK(correlator_analytic(s, a, b) ==
          Approx(oracle::correlator(ref, a.polarization_rad(), b.polarization_rad())).epsilon(1e-12));
  }
}

TEST_CASE("s_optimal matches a 2 degree grid search on 50 random states") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 50; ++t) {
    const auto ref = oracle::random_real_state(rng);
    const auto s = from_oracle(ref);
    const auto opt = s_optimal(s);
    const double grid = oracle::grid_max_chsh(ref, 2.0);
    CAPTURE(t);
    CHECK(grid <= opt.s_linear + 1e-9);
    CHECK(opt.s_linear - grid <= kGridTolerance);
    CHECK(opt.s_linear <= opt.s_max + 1e-12);
    CHECK(opt.at_linear_settings.S == Approx(opt.s_linear).epsilon(1e-9));
  }
}

TEST_CASE("Horodecki bound respects Tsirelson and is reached by Bell states") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto opt = s_optimal(from_oracle(oracle::random_density(rng)));
    CHECK(opt.s_max <= oracle::kTsirelson + 1e-12);
    CHECK(opt.s_linear <= opt.s_max + 1e-12);
  }
  for (BellLabel l : kLabels) {
    SourceModel src;
    src.label = l;
    const auto opt = s_optimal(generate(src));
    CHECK(opt.s_max == Approx(oracle::kTsirelson));
    CHECK(opt.s_linear == Approx(oracle::kTsirelson));
  }
  // separable: no violation
  CHECK(s_optimal(TwoQubitState::maximally_mixed()).s_max == Approx(0.0));
}

TEST_CASE("s_from_counts on expected counts reproduces s_analytic") {
  const double n = 1e6;
  for (int l = 0; l < 4; ++l) {
    for (double w : {0.7, 0.93, 1.0}) {
      const auto s = from_oracle(oracle::werner(l, w));
      const auto cs = ChshSettings::canonical(kLabels[l]);
      const auto est = s_from_counts(expected_table(s, cs, n), cs);
      CHECK(std::abs(est.S - s_analytic(s, cs).S) < 1e-3);
      for (int i = 0; i < 4; ++i) CHECK(est.sigma_E[i] == Approx(std::sqrt((1 - est.E[i] * est.E[i]) / n)));
    }
  }
  // maximal Phi+: each |E| = 1/sqrt2, sigma_S = 2 sqrt(0.5 / n)
  const auto cs = ChshSettings::canonical(BellLabel::PhiPlus);
  const auto est = s_from_counts(expected_table(generate(SourceModel{}), cs, n), cs);
  CHECK(est.sigma_S == Approx(0.0014142135).epsilon(1e-6));
}

TEST_CASE("s_from_counts reports missing setting pairs and empty rows") {
  const auto cs = ChshSettings::canonical(BellLabel::PhiPlus);
  CoincidenceTable t = expected_table(generate(SourceModel{}), cs, 1000);
  CoincidenceTable partial;
  partial.add(t.rows()[0]);
  partial.add(t.rows()[3]);
  try {
    s_from_counts(partial, cs);
    FAIL("expected IncompleteTableError");
  } catch (const IncompleteTableError& e) {
    CHECK(e.missing().size() == 2);
  }

  CoincidenceTable zero;
  for (auto row : t.rows()) {
    if (zero.size() == 1) row.counts = OutcomeCounts{};
    zero.add(row);
  }
  CHECK_THROWS_AS(s_from_counts(zero, cs), ValidationError);

  ChshSettings bad = cs;
  bad.b_prime = bad.b;
  CHECK_THROWS_AS(s_analytic(generate(SourceModel{}), bad), DomainError);
}
