#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkdsim/chsh.hpp"
#include "qkdsim/measurement.hpp"
#include "qkdsim/protocol.hpp"
#include "qkdsim/security.hpp"

namespace qkdsim {

// Count record files: one projector combination per row, as recorded by
// rotating Alice's and Bob's plates. Text, UTF-8, '#' starts a comment.
//
//   file      = { blank | comment } , directive+ , column-line , row+
//   directive = "@version" ws "1"
//             | "@state" ws label                 (PhiPlus | PhiMinus | PsiPlus | PsiMinus)
//             | "@acquisition_s" ws decimal       (> 0, seconds per row)
//             | "@coincidence_window_s" ws decimal  (optional, > 0)
//   column-line = "alice_hwp_deg,bob_hwp_deg,singles_a,singles_b,coincidences"
//   row       = decimal "," decimal "," count "," count "," count
//
// @version, @state and @acquisition_s are required and must precede the
// column line. A row's "+" projection is polarization 2 * hwp; the "-"
// projection of the same analyzer is the row at hwp + 45.

inline constexpr int kCountFormatVersion = 1;
inline constexpr std::string_view kCountColumns = "alice_hwp_deg,bob_hwp_deg,singles_a,singles_b,coincidences";

struct CountRecordRow {
  double alice_hwp_deg = 0.0;
  double bob_hwp_deg = 0.0;
  std::uint64_t singles_a = 0;
  std::uint64_t singles_b = 0;
  std::uint64_t coincidences = 0;
  std::size_t line = 0;  // 1-based source line, 0 when built in memory
};

struct CountRecordFile {
  int version = kCountFormatVersion;
  BellLabel label = BellLabel::PhiPlus;
  double acquisition_s = 1.0;
  std::optional<double> coincidence_window_s;
  std::vector<CountRecordRow> rows;
};

/// Strict parse. Throws ParseError with line and column.
CountRecordFile parse_counts(std::istream& in, const std::string& source_name = "<stream>");
CountRecordFile parse_counts(std::string_view text, const std::string& source_name = "<string>");
/// Throws IoError when the file cannot be opened.
CountRecordFile parse_counts_file(const std::filesystem::path& path);

/// Writes the canonical form; parse_counts(write_counts(f)) == f.
void write_counts(std::ostream& out, const CountRecordFile& file);
std::string write_counts(const CountRecordFile& file);

struct AnalysisOptions {
  /// coincidences - singles_a * singles_b * window / acquisition, rounded
  /// and clamped at 0. Requires @coincidence_window_s.
  bool subtract_accidentals = false;
};

struct AnalysisResult {
  ChshEstimate chsh;
  SecurityReport security;
  std::vector<BasisQber> per_basis;
  CoincidenceTable table;  // outcome quadruples assembled from projector rows
};

/// Every (Alice, Bob) projector-row pair the analysis needs, as plate angles.
std::vector<std::pair<AnalyzerSetting, AnalyzerSetting>> required_rows(const ChshSettings& settings,
                                                                       ProtocolKind protocol, BellLabel label);

/// CHSH from the four setting pairs and QBER from the protocol's key bases;
/// e_p is the QBER of the conjugate key basis. Throws IncompleteTableError
/// listing all missing rows.
AnalysisResult analyze_counts(const CountRecordFile& file, const ChshSettings& settings, ProtocolKind protocol,
                              const AnalysisOptions& options = {});

enum class SynthesisMode {
  Sampled,   // sample_outcomes per setting pair
  Expected,  // rounded expectation values, no noise
  Poisson,   // independent Poisson count per projector row
};

struct SynthesisSpec {
  TwoQubitState state = TwoQubitState::maximally_mixed();
  BellLabel label = BellLabel::PhiPlus;
  DetectorModel det;
  std::uint64_t n_pairs_per_setting = 100'000;
  SynthesisMode mode = SynthesisMode::Sampled;
  double acquisition_s = 1.0;
  std::uint64_t seed = 1;
};

/// Simulated measurement campaign producing every row required_rows lists.
/// Singles are drawn as Binomial(n, eta * P(+)) per arm.
CountRecordFile synthesize_counts(const SynthesisSpec& spec, const ChshSettings& settings, ProtocolKind protocol);

}  // namespace qkdsim
