#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qkdsim/analyzer.hpp"
#include "qkdsim/errors.hpp"
#include "qkdsim/qstate.hpp"

using namespace qkdsim;
using doctest::Approx;

namespace {

constexpr BellLabel kLabels[] = {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

DensityMatrix to_eigen(const oracle::Mat4& m) {
  DensityMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m[i][j];
  return out;
}

}  // namespace

TEST_CASE("analyzer angles wrap and compare by projector") {
  CHECK(AnalyzerSetting::from_hwp(200.0).hwp_deg() == Approx(20.0));
  CHECK(AnalyzerSetting::from_hwp(-22.5).hwp_deg() == Approx(157.5));
  CHECK(AnalyzerSetting::from_hwp(22.5).polarization_deg() == Approx(45.0));
  CHECK(AnalyzerSetting::from_polarization(-22.5).polarization_deg() == Approx(157.5));

  const auto a = AnalyzerSetting::from_hwp(11.25);
  CHECK(a.same_projector(AnalyzerSetting::from_hwp(101.25)));
  CHECK_FALSE(a.same_projector(a.orthogonal()));
  CHECK(a.orthogonal().orthogonal().same_projector(a));
  CHECK(a.reflected().polarization_deg() == Approx(180.0 - 22.5));
  CHECK(AnalyzerSetting::from_hwp(0.0).same_projector(AnalyzerSetting::from_hwp(179.9999999)));
  CHECK_THROWS_AS(AnalyzerSetting::from_hwp(std::nan("")), DomainError);
}

TEST_CASE("bell labels parse in common spellings") {
  CHECK(parse_bell_label("PhiPlus") == BellLabel::PhiPlus);
  CHECK(parse_bell_label("phi+") == BellLabel::PhiPlus);
  CHECK(parse_bell_label("Psi_Minus") == BellLabel::PsiMinus);
  CHECK(parse_bell_label("singlet") == BellLabel::PsiMinus);
  for (BellLabel l : kLabels) CHECK(parse_bell_label(to_string(l)) == l);
  CHECK_THROWS_AS(parse_bell_label("chi+"), DomainError);
}

TEST_CASE("bell states match the oracle amplitudes") {
  for (int l = 0; l < 4; ++l) {
    for (double eps : {0.0, 0.3, std::numbers::pi / 4, 1.2, std::numbers::pi / 2}) {
      const auto psi = bell_state(kLabels[l], eps);
      const auto ref = oracle::bell(l, eps);
      CHECK(psi.amplitudes().norm() == Approx(1.0));
      for (int i = 0; i < 4; ++i) CHECK(std::abs(psi[i] - ref[i]) < 1e-15);
    }
  }
  CHECK_THROWS_AS(bell_state(BellLabel::PhiPlus, -0.01), DomainError);
  CHECK_THROWS_AS(bell_state(BellLabel::PhiPlus, 1.6), DomainError);
}

TEST_CASE("pure state density is rank one") {
  const auto rho = to_density(bell_state(BellLabel::PsiMinus, 0.4));
  CHECK(rho.trace() == Approx(1.0));
  CHECK(rho.purity() == Approx(1.0));
  CHECK(rho.min_eigenvalue() > -1e-12);
  CHECK(TwoQubitState::maximally_mixed().purity() == Approx(0.25));
  CHECK_THROWS_AS(PureTwoQubit::normalized(Amplitudes::Zero()), DomainError);
}

TEST_CASE("density matrix factory enforces its invariants") {
  DensityMatrix bad = DensityMatrix::Identity() / 4.0;
  bad(0, 1) = 0.1;  // not Hermitian
  CHECK_THROWS_AS(TwoQubitState::from_matrix(bad), InvariantError);

  DensityMatrix trace2 = DensityMatrix::Identity() / 2.0;
  CHECK_THROWS_AS(TwoQubitState::from_matrix(trace2), InvariantError);

  DensityMatrix negative = DensityMatrix::Zero();
  negative(0, 0) = 1.2;
  negative(3, 3) = -0.2;
  CHECK_THROWS_AS(TwoQubitState::from_matrix(negative), InvariantError);

  // trace off by less than the tolerance is accepted as is
  DensityMatrix close = DensityMatrix::Identity() / 4.0;
  close(0, 0) += 5e-13;
  CHECK_NOTHROW(TwoQubitState::from_matrix(close));
}

TEST_CASE("joint probabilities agree with the oracle on random states and settings") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 180.0);
  for (int trial = 0; trial < 200; ++trial) {
    const oracle::Mat4 ref = oracle::random_density(rng);
    const auto state = TwoQubitState::from_matrix(to_eigen(ref));
    const auto a = AnalyzerSetting::from_hwp(angle(rng));
    const auto b = AnalyzerSetting::from_hwp(angle(rng));
    const auto dist = joint_probabilities(state, a, b);
    CHECK(dist.sum() == Approx(1.0).epsilon(1e-12));
    for (int o = 0; o < 4; ++o) {
      CHECK(dist[o] == Approx(oracle::prob(ref, a.polarization_rad(), b.polarization_rad(), o)).epsilon(1e-12));
    }
  }
}

TEST_CASE("maximal Phi+ is perfectly correlated in H/V and D/A") {
  const auto rho = to_density(bell_state(BellLabel::PhiPlus, std::numbers::pi / 4));
  const auto hv = joint_probabilities(rho, AnalyzerSetting::from_hwp(0), AnalyzerSetting::from_hwp(0));
  CHECK(hv[kPlusPlus] == Approx(0.5));
  CHECK(hv[kMinusMinus] == Approx(0.5));
  CHECK(hv.correlator() == Approx(1.0));
  const auto da = joint_probabilities(rho, AnalyzerSetting::from_hwp(22.5), AnalyzerSetting::from_hwp(22.5));
  CHECK(da.correlator() == Approx(1.0));
  // Psi- is anticorrelated in every common basis
  const auto singlet = to_density(bell_state(BellLabel::PsiMinus, std::numbers::pi / 4));
  for (double t : {0.0, 10.0, 22.5, 33.0}) {
    const auto s = AnalyzerSetting::from_hwp(t);
    CHECK(joint_probabilities(singlet, s, s).correlator() == Approx(-1.0));
  }
}

TEST_CASE("joint probabilities reject an unphysical state") {
  DensityMatrix m = DensityMatrix::Zero();
  m(0, 0) = 1.5;
  m(3, 3) = -0.5;
  const auto s = TwoQubitState::unchecked(m);
  CHECK_THROWS_AS(joint_probabilities(s, AnalyzerSetting::from_hwp(0), AnalyzerSetting::from_hwp(0)), InvariantError);
}

TEST_CASE("partial traces") {
  const auto rho = to_density(bell_state(BellLabel::PhiPlus, 0.3));
  const auto rb = reduce_to_b(rho.rho());
  CHECK(rb(0, 0).real() == Approx(std::cos(0.3) * std::cos(0.3)));
  CHECK(std::abs(rb(0, 1)) < 1e-15);
  const auto ra = reduce_to_a(rho.rho());
  CHECK(ra(1, 1).real() == Approx(std::sin(0.3) * std::sin(0.3)));

  // swap maps Psi+ to itself and Psi- to minus itself
  const Eigen::Matrix4d sw = swap_operator();
  const auto psi_minus = bell_state(BellLabel::PsiMinus, std::numbers::pi / 4).amplitudes();
  CHECK((sw.cast<std::complex<double>>() * psi_minus + psi_minus).norm() < 1e-15);
}
