#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qkdsim/measurement.hpp"
#include "qkdsim/optics.hpp"
#include "qkdsim/protocol.hpp"

namespace qkdsim {

/// Which knob the sweep turns.
///   werner             visibility W in [0, 1] (single-arm depolarizing, p = 1 - W)
///   imbalance          amplitude angle epsilon in [0, pi/2] radians
///   hom_visibility     HOM visibility V in [0, 1]
///   intercept_fraction Eve's intercept-resend fraction in [0, 1]
enum class Mechanism { Werner, Imbalance, HomVisibility, InterceptFraction };

std::string_view to_string(Mechanism m) noexcept;
Mechanism parse_mechanism(std::string_view text);

enum class SweepOutput { S, QBER, I_AB, I_AE, r };
std::string_view to_string(SweepOutput o) noexcept;
SweepOutput parse_sweep_output(std::string_view text);

struct SweepSpec {
  Mechanism mechanism = Mechanism::Werner;
  std::vector<double> grid;
  std::uint64_t n_pairs = 100'000;  // per setting pair, per point
  ProtocolKind protocol = ProtocolKind::BBM92;
  BellLabel label = BellLabel::PhiPlus;
  DetectorModel det;
  std::vector<SweepOutput> outputs{SweepOutput::S, SweepOutput::QBER, SweepOutput::I_AB, SweepOutput::I_AE,
                                   SweepOutput::r};
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct SweepRow {
  double param = 0.0;
  double S_analytic = 0.0;
  double S_sampled = 0.0;
  double sigma_S = 0.0;
  double S_model = 0.0;  // 2 sqrt 2 (1 - 2 qber)
  double qber_analytic = 0.0;
  double qber = 0.0;  // basis-averaged, sampled
  double sigma_qber = 0.0;
  std::vector<double> qber_basis;  // per key basis, sampled
  double I_AB = 0.0;
  double I_AE = 0.0;
  double r = 0.0;
};

/// Source and channel for one grid value.
struct PointModel {
  SourceModel source;
  ChannelModel channel = ChannelModel::identity();
};
PointModel point_model(const SweepSpec& spec, double value);

/// One row per grid value, in grid order. Points run in parallel when
/// `exec` is Parallel; the output is identical either way.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, Execution exec = Execution::Parallel);

inline constexpr std::string_view kSweepFormatTag = "qkdsim-sweep v1";

/// Column names for the requested outputs, starting with mechanism_param.
std::vector<std::string> sweep_columns(const SweepSpec& spec);

/// First line "# qkdsim-sweep v1 ...", then a header and one row per point.
void write_sweep_table(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows,
                       char delimiter = ',');

struct SweepTable {
  std::string tag_line;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;  // throws if absent
};

/// Reads a table written by write_sweep_table (delimiter auto-detected).
SweepTable read_sweep_table(std::istream& in);

}  // namespace qkdsim
