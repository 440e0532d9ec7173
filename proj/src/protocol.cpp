#include "qkdsim/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "qkdsim/errors.hpp"
#include "qkdsim/seeding.hpp"

namespace qkdsim {
namespace {

constexpr std::uint64_t kEventStream = 0;
constexpr std::uint64_t kDisclosureStream = 1;

std::vector<AnalyzerSetting> from_hwp(std::initializer_list<double> angles, bool mirror) {
  std::vector<AnalyzerSetting> out;
  for (double a : angles) {
    const auto s = AnalyzerSetting::from_hwp(a);
    out.push_back(mirror ? s.reflected() : s);
  }
  return out;
}

}  // namespace

std::string_view to_string(ProtocolKind kind) noexcept { return kind == ProtocolKind::BBM92 ? "BBM92" : "E91"; }

ProtocolKind parse_protocol(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (key == "BBM92") return ProtocolKind::BBM92;
  if (key == "E91") return ProtocolKind::E91;
  throw DomainError("unknown protocol '" + std::string(text) + "' (expected BBM92 or E91)");
}

int ProtocolBases::key_index(int alice_index, int bob_index) const noexcept {
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i].alice == alice_index && key[i].bob == bob_index) return static_cast<int>(i);
  }
  return -1;
}

bool key_flip(BellLabel label, const AnalyzerSetting& a, const AnalyzerSetting& b) {
  const TwoQubitState ideal = to_density(bell_state(label, std::numbers::pi / 4.0));
  return joint_probabilities(ideal, a, b).correlator() < 0.0;
}

ProtocolBases protocol_bases(ProtocolKind kind, BellLabel label) {
  ProtocolBases pb;
  if (kind == ProtocolKind::BBM92) {
    pb.alice = from_hwp({0.0, 22.5}, false);
    pb.bob = from_hwp({0.0, 22.5}, false);
    for (int i = 0; i < 2; ++i) pb.key.push_back({i, i, key_flip(label, pb.alice[i], pb.bob[i])});
    return pb;
  }
  const bool mirror = label == BellLabel::PhiMinus || label == BellLabel::PsiPlus;
  pb.alice = from_hwp({0.0, 11.25, 22.5}, false);
  pb.bob = from_hwp({11.25, 22.5, 33.75}, mirror);
  // Polarization 22.5 (Alice 1, Bob 0) and 45 (Alice 2, Bob 1) coincide.
  pb.key.push_back({1, 0, key_flip(label, pb.alice[1], pb.bob[0])});
  pb.key.push_back({2, 1, key_flip(label, pb.alice[2], pb.bob[1])});
  pb.chsh = {{0, 0}, {0, 2}, {2, 0}, {2, 2}};
  pb.chsh_settings = ChshSettings::canonical(label);
  return pb;
}

SiftResult sift(std::span<const std::uint8_t> alice_bases, std::span<const std::uint8_t> bob_bases,
                std::span<const std::uint8_t> outcomes, const ProtocolBases& bases) {
  if (alice_bases.size() != bob_bases.size() || alice_bases.size() != outcomes.size()) {
    throw DomainError("sift: announcement and outcome streams differ in length");
  }
  SiftResult out;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const int k = bases.key_index(alice_bases[i], bob_bases[i]);
    if (k < 0) continue;
    const std::uint8_t alice_bit = outcomes[i] >> 1;
    const std::uint8_t bob_out = outcomes[i] & 1;
    out.kept.push_back(i);
    out.basis.push_back(static_cast<std::uint8_t>(k));
    out.alice_bits.push_back(alice_bit);
    out.bob_bits.push_back(static_cast<std::uint8_t>(bases.key[k].flip ? bob_out ^ 1 : bob_out));
  }
  return out;
}

void SessionConfig::validate() const {
  source.validate();
  det.validate();
  if (n_pairs < 1) throw DomainError("session: n_pairs must be >= 1");
  if (!(qber_sample_fraction > 0.0 && qber_sample_fraction < 1.0)) {
    throw DomainError("session: qber_sample_fraction must lie in (0, 1)");
  }
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SessionRecord run_session(const SessionConfig& cfg, Execution exec) {
  cfg.validate();
  const ProtocolBases bases = protocol_bases(cfg.kind, cfg.source.label);
  const TwoQubitState state = apply_channel(generate(cfg.source), cfg.channel);
  const std::vector<PairEvent> events =
      intercept_resend(state, bases.alice, bases.bob, cfg.det, cfg.n_pairs, cfg.channel.eve_fraction(),
                       derive_seed(cfg.seed, kEventStream), exec);

  SessionRecord rec;
  rec.kind = cfg.kind;
  rec.label = cfg.source.label;
  rec.n_pairs = cfg.n_pairs;
  rec.coincidences = events.size();

  std::vector<std::uint8_t> alice_bases, bob_bases, outcomes;
  alice_bases.reserve(events.size());
  bob_bases.reserve(events.size());
  outcomes.reserve(events.size());
  CoincidenceTable chsh_table;
  std::vector<OutcomeCounts> chsh_counts(bases.chsh.size());
  for (const PairEvent& e : events) {
    rec.accidentals += e.accidental ? 1 : 0;
    alice_bases.push_back(e.alice);
    bob_bases.push_back(e.bob);
    outcomes.push_back(e.outcome);
    for (std::size_t c = 0; c < bases.chsh.size(); ++c) {
      if (bases.chsh[c] == std::pair<int, int>{e.alice, e.bob}) {
        ++chsh_counts[c].n[e.outcome];
        ++rec.chsh_events;
      }
    }
  }

  const SiftResult sifted = sift(alice_bases, bob_bases, outcomes, bases);
  rec.sifted_length = sifted.kept.size();
  if (rec.sifted_length == 0) throw NoSiftedBitsError();

  // Uniformly random disclosure subset (partial Fisher-Yates).
  const std::uint64_t disclose = std::clamp<std::uint64_t>(
      static_cast<std::uint64_t>(std::llround(cfg.qber_sample_fraction * static_cast<double>(rec.sifted_length))),
      1, rec.sifted_length);
  std::vector<std::size_t> order(rec.sifted_length);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(cfg.seed, kDisclosureStream));
  for (std::uint64_t i = 0; i < disclose; ++i) {
    const std::uint64_t span = rec.sifted_length - i;
    const auto j = i + static_cast<std::uint64_t>(std::min(
                           static_cast<double>(span - 1), std::floor(unit_double(rng) * static_cast<double>(span))));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> disclosed(rec.sifted_length, false);
  for (std::uint64_t i = 0; i < disclose; ++i) disclosed[order[i]] = true;

  rec.per_basis.resize(bases.key.size());
  for (std::size_t k = 0; k < bases.key.size(); ++k) {
    rec.per_basis[k].alice = bases.alice[bases.key[k].alice];
    rec.per_basis[k].bob = bases.bob[bases.key[k].bob];
  }
  for (std::size_t i = 0; i < rec.sifted_length; ++i) {
    BasisQber& bq = rec.per_basis[sifted.basis[i]];
    ++bq.sifted;
    const bool mismatch = sifted.alice_bits[i] != sifted.bob_bits[i];
    if (disclosed[i]) {
      ++bq.disclosed;
      bq.errors += mismatch ? 1 : 0;
    } else {
      rec.key_bits_alice.push_back(sifted.alice_bits[i]);
      rec.key_bits_bob.push_back(sifted.bob_bits[i]);
      rec.retained_mismatches += mismatch ? 1 : 0;
    }
  }
  for (BasisQber& bq : rec.per_basis) {
    rec.disclosed_errors += bq.errors;
    bq.qber = bq.disclosed > 0 ? static_cast<double>(bq.errors) / static_cast<double>(bq.disclosed) : 0.0;
  }
  rec.disclosed_length = disclose;
  rec.retained_length = rec.key_bits_alice.size();
  rec.qber_hat = static_cast<double>(rec.disclosed_errors) / static_cast<double>(disclose);
  const Interval ci = wilson_interval(rec.disclosed_errors, disclose);
  rec.qber_ci_low = ci.low;
  rec.qber_ci_high = ci.high;

  if (bases.chsh_settings) {
    const auto pairs = bases.chsh_settings->pairs();
    bool complete = true;
    for (std::size_t c = 0; c < bases.chsh.size(); ++c) {
      complete = complete && chsh_counts[c].total() > 0;
      chsh_table.add({pairs[c].first, pairs[c].second, chsh_counts[c], "session"});
    }
    if (complete) rec.chsh_subset = s_from_counts(chsh_table, *bases.chsh_settings);
  }
  return rec;
}

SecurityReport session_security(const SessionRecord& record) {
  const double e_b = record.per_basis.at(0).qber;
  const double e_p = record.per_basis.size() > 1 ? record.per_basis[1].qber : e_b;
  std::optional<double> measured;
  if (record.chsh_subset) measured = record.chsh_subset->S;
  return assess(e_b, e_p, measured);
}

}  // namespace qkdsim
