#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qkdsim/chsh.hpp"
#include "qkdsim/kernels.hpp"
#include "qkdsim/measurement.hpp"
#include "qkdsim/optics.hpp"
#include "qkdsim/security.hpp"

namespace qkdsim {

enum class ProtocolKind { BBM92, E91 };

std::string_view to_string(ProtocolKind kind) noexcept;
ProtocolKind parse_protocol(std::string_view text);

/// Measurement bases for one protocol and source label.
///
/// BBM92: both parties use plate angles {0, 22.5} (H/V and D/A).
/// E91: Alice {0, 11.25, 22.5}, Bob {11.25, 22.5, 33.75}; matched
/// combinations form the key and (0|45, 22.5|67.5 polarization) feed the
/// CHSH test. For PhiMinus and PsiPlus Bob's E91 analyzers are mirrored
/// (polarization p -> -p) so matched settings stay perfectly correlated.
struct ProtocolBases {
  struct KeyBasis {
    int alice;
    int bob;
    /// Bob inverts his bit: the ideal state is anticorrelated here.
    bool flip;
  };

  std::vector<AnalyzerSetting> alice;
  std::vector<AnalyzerSetting> bob;
  std::vector<KeyBasis> key;
  /// E91 only, in ChshSettings::pairs() order.
  std::vector<std::pair<int, int>> chsh;
  std::optional<ChshSettings> chsh_settings;

  /// Index into `key`, or -1 when (alice, bob) is not a key combination.
  int key_index(int alice_index, int bob_index) const noexcept;
};

ProtocolBases protocol_bases(ProtocolKind kind, BellLabel label);

/// True when the maximal `label` state is anticorrelated at (a, b).
bool key_flip(BellLabel label, const AnalyzerSetting& a, const AnalyzerSetting& b);

struct SiftResult {
  std::vector<std::size_t> kept;       // event positions, in order
  std::vector<std::uint8_t> basis;     // index into ProtocolBases::key
  std::vector<std::uint8_t> alice_bits;
  std::vector<std::uint8_t> bob_bits;
};

/// Keeps the events whose announced bases form a key combination. Alice's
/// bit is her outcome ("+" -> 0); Bob's is his outcome, inverted when the
/// combination is anticorrelated. Throws DomainError on length mismatch.
SiftResult sift(std::span<const std::uint8_t> alice_bases, std::span<const std::uint8_t> bob_bases,
                std::span<const std::uint8_t> outcomes, const ProtocolBases& bases);

struct SessionConfig {
  ProtocolKind kind = ProtocolKind::BBM92;
  SourceModel source;
  ChannelModel channel = ChannelModel::identity();
  DetectorModel det;
  std::uint64_t n_pairs = 1'000'000;
  double qber_sample_fraction = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct BasisQber {
  AnalyzerSetting alice;
  AnalyzerSetting bob;
  std::uint64_t sifted = 0;
  std::uint64_t disclosed = 0;
  std::uint64_t errors = 0;  // among disclosed
  double qber = 0.0;
};

struct SessionRecord {
  ProtocolKind kind = ProtocolKind::BBM92;
  BellLabel label = BellLabel::PhiPlus;
  std::uint64_t n_pairs = 0;
  std::uint64_t coincidences = 0;
  std::uint64_t accidentals = 0;
  std::uint64_t sifted_length = 0;
  std::uint64_t disclosed_length = 0;
  std::uint64_t retained_length = 0;
  std::uint64_t disclosed_errors = 0;
  double qber_hat = 0.0;
  double qber_ci_low = 0.0;   // Wilson 95%
  double qber_ci_high = 0.0;
  std::vector<BasisQber> per_basis;
  std::optional<ChshEstimate> chsh_subset;
  std::uint64_t chsh_events = 0;
  std::vector<std::uint8_t> key_bits_alice;
  std::vector<std::uint8_t> key_bits_bob;
  /// Positions where retained bits differ. Only a simulator can know this.
  std::uint64_t retained_mismatches = 0;
};

/// Runs one session. Throws NoSiftedBitsError when nothing survives sifting.
SessionRecord run_session(const SessionConfig& cfg, Execution exec = Execution::Parallel);

/// e_b and e_p are the QBERs of the first and second key basis; E91 feeds
/// its measured S into I(A:E).
SecurityReport session_security(const SessionRecord& record);

struct Interval {
  double low;
  double high;
};
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

}  // namespace qkdsim
