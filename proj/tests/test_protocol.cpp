#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qkdsim/errors.hpp"
#include "qkdsim/protocol.hpp"

using namespace qkdsim;
using doctest::Approx;

namespace {

constexpr BellLabel kLabels[] = {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

SessionConfig config(ProtocolKind kind, BellLabel label, std::uint64_t n = 200'000) {
  SessionConfig cfg;
  cfg.kind = kind;
  cfg.source.label = label;
  cfg.n_pairs = n;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("protocol names") {
  CHECK(parse_protocol("bbm92") == ProtocolKind::BBM92);
  CHECK(parse_protocol("E91") == ProtocolKind::E91);
  CHECK(to_string(ProtocolKind::E91) == "E91");
  CHECK_THROWS_AS(parse_protocol("BB84"), DomainError);
}

TEST_CASE("key flips follow the ideal correlation sign") {
  const auto hv = AnalyzerSetting::from_hwp(0);
  const auto da = AnalyzerSetting::from_hwp(22.5);
  CHECK_FALSE(key_flip(BellLabel::PhiPlus, hv, hv));
  CHECK_FALSE(key_flip(BellLabel::PhiPlus, da, da));
  CHECK_FALSE(key_flip(BellLabel::PhiMinus, hv, hv));
  CHECK(key_flip(BellLabel::PhiMinus, da, da));
  CHECK(key_flip(BellLabel::PsiPlus, hv, hv));
  CHECK_FALSE(key_flip(BellLabel::PsiPlus, da, da));
  CHECK(key_flip(BellLabel::PsiMinus, hv, hv));
  CHECK(key_flip(BellLabel::PsiMinus, da, da));
}

TEST_CASE("E91 bases: matched settings are perfectly (anti)correlated for every label") {
  for (BellLabel l : kLabels) {
    const auto pb = protocol_bases(ProtocolKind::E91, l);
    REQUIRE(pb.alice.size() == 3);
    REQUIRE(pb.bob.size() == 3);
    REQUIRE(pb.key.size() == 2);
    const auto ideal = to_density(bell_state(l, std::numbers::pi / 4));
    for (const auto& k : pb.key) {
      const double e = joint_probabilities(ideal, pb.alice[k.alice], pb.bob[k.bob]).correlator();
      CHECK(std::abs(e) == Approx(1.0));
      CHECK((e < 0) == k.flip);
    }
    CHECK(pb.key_index(0, 0) == -1);
    CHECK(pb.key_index(1, 0) == 0);
    CHECK(pb.key_index(2, 1) == 1);
  }
}

TEST_CASE("sift keeps compatible bases and applies the flip") {
  const auto pb = protocol_bases(ProtocolKind::BBM92, BellLabel::PsiMinus);
  const std::vector<std::uint8_t> a{0, 0, 1, 1, 0};
  const std::vector<std::uint8_t> b{0, 1, 1, 0, 0};
  const std::vector<std::uint8_t> o{kPlusMinus, kPlusPlus, kMinusPlus, kMinusMinus, kPlusPlus};
  const auto r = sift(a, b, o, pb);
  REQUIRE(r.kept == std::vector<std::size_t>{0, 2, 4});
  CHECK(r.basis == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(r.alice_bits == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(r.bob_bits == std::vector<std::uint8_t>{0, 1, 1});  // Psi-: Bob inverts in both bases

  const std::vector<std::uint8_t> short_b{0};
  CHECK_THROWS_AS(sift(a, short_b, o, pb), DomainError);
}

TEST_CASE("BBM92 sift ratio is one half") {
  const auto rec = run_session(config(ProtocolKind::BBM92, BellLabel::PhiPlus, 1'000'000));
  const double n = static_cast<double>(rec.coincidences);
  const double ratio = static_cast<double>(rec.sifted_length) / n;
  CHECK(oracle::within_sigma(ratio, 0.5, std::sqrt(0.25 / n), 5.0));
}

TEST_CASE("E91 key fraction is two ninths and the CHSH subset violates") {
  const auto rec = run_session(config(ProtocolKind::E91, BellLabel::PhiPlus, 1'000'000));
  const double n = static_cast<double>(rec.coincidences);
  const double p = 2.0 / 9.0;
  CHECK(oracle::within_sigma(rec.sifted_length / n, p, std::sqrt(p * (1 - p) / n), 5.0));
  CHECK(oracle::within_sigma(rec.chsh_events / n, 4.0 / 9.0, std::sqrt(4.0 / 9 * 5.0 / 9 / n), 5.0));
  REQUIRE(rec.chsh_subset);
  CHECK(oracle::within_sigma(rec.chsh_subset->S, oracle::kTsirelson, rec.chsh_subset->sigma_S, 5.0));
}

TEST_CASE("maximal states give an error-free key in both protocols") {
  for (auto kind : {ProtocolKind::BBM92, ProtocolKind::E91}) {
    for (BellLabel l : kLabels) {
      const auto rec = run_session(config(kind, l));
      CAPTURE(to_string(l));
      CHECK(rec.disclosed_errors == 0);
      CHECK(rec.retained_mismatches == 0);
      CHECK(rec.key_bits_alice == rec.key_bits_bob);
      CHECK(rec.disclosed_length + rec.retained_length == rec.sifted_length);
      const auto sec = session_security(rec);
      CHECK(sec.r > 0.9);
      if (kind == ProtocolKind::E91) {
        REQUIRE(rec.chsh_subset);
        CHECK(rec.chsh_subset->S > 2.7);
      }
    }
  }
}

TEST_CASE("Werner 0.86 session sits near QBER 0.07") {
  auto cfg = config(ProtocolKind::BBM92, BellLabel::PhiPlus, 1'000'000);
  cfg.channel = ChannelModel::werner(0.86);
  const auto rec = run_session(cfg);
  const double n = static_cast<double>(rec.disclosed_length);
  CHECK(oracle::within_sigma(rec.qber_hat, 0.07, std::sqrt(0.07 * 0.93 / n), 5.0));
  CHECK(rec.qber_ci_low < rec.qber_hat);
  CHECK(rec.qber_ci_high > rec.qber_hat);
  // the retained key carries the same error rate
  const double kept = static_cast<double>(rec.retained_length);
  CHECK(oracle::within_sigma(rec.retained_mismatches / kept, 0.07, std::sqrt(0.07 * 0.93 / kept), 5.0));
  const auto sec = session_security(rec);
  CHECK(sec.verdicts.individual_bound_ok);
  CHECK(sec.verdicts.collective_bound_ok);
  CHECK_FALSE(sec.verdicts.mi_positive);
}

TEST_CASE("full intercept-resend: QBER one quarter, nothing secure") {
  auto cfg = config(ProtocolKind::BBM92, BellLabel::PhiPlus, 1'000'000);
  cfg.channel = ChannelModel::intercept_resend(1.0);
  const auto rec = run_session(cfg);
  const double n = static_cast<double>(rec.disclosed_length);
  CHECK(oracle::within_sigma(rec.qber_hat, 0.25, std::sqrt(0.25 * 0.75 / n), 5.0));
  const auto sec = session_security(rec);
  CHECK(sec.r < 0);
  CHECK_FALSE(sec.verdicts.individual_bound_ok);
  CHECK_FALSE(sec.verdicts.collective_bound_ok);
}

TEST_CASE("sessions are deterministic and independent of threading") {
  auto cfg = config(ProtocolKind::E91, BellLabel::PsiMinus, 300'000);
  cfg.channel = ChannelModel::intercept_resend(0.3);
  cfg.det.dark_rate = 0.01;
  const auto a = run_session(cfg, Execution::Parallel);
  const auto b = run_session(cfg, Execution::Serial);
  CHECK(a.key_bits_alice == b.key_bits_alice);
  CHECK(a.key_bits_bob == b.key_bits_bob);
  CHECK(a.disclosed_errors == b.disclosed_errors);
  CHECK(a.accidentals == b.accidentals);
  CHECK(a.accidentals > 0);
  cfg.seed = 6;
  CHECK(run_session(cfg).key_bits_alice != a.key_bits_alice);
}

TEST_CASE("a session with no coincidences in compatible bases is an error") {
  auto cfg = config(ProtocolKind::BBM92, BellLabel::PhiPlus, 10);
  cfg.det.efficiency = 1e-6;
  CHECK_THROWS_AS(run_session(cfg), NoSiftedBitsError);
  cfg.qber_sample_fraction = 1.0;
  CHECK_THROWS_AS(run_session(cfg), DomainError);
}

TEST_CASE("Wilson interval") {
  const auto ci = wilson_interval(10, 100);
  CHECK(ci.low == Approx(0.05522913706067509).epsilon(1e-4));
  CHECK(ci.high == Approx(0.17436566150491348).epsilon(1e-4));
  const auto zero = wilson_interval(0, 100);
  CHECK(zero.low == 0.0);
  CHECK(zero.high == Approx(0.03699349820698569).epsilon(1e-4));
}
