#include "qkdsim/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qkdsim/chsh.hpp"
#include "qkdsim/errors.hpp"
#include "qkdsim/security.hpp"
#include "qkdsim/seeding.hpp"

namespace qkdsim {
namespace {

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool wants(const SweepSpec& spec, SweepOutput o) {
  return std::find(spec.outputs.begin(), spec.outputs.end(), o) != spec.outputs.end();
}

double error_rate(const OutcomeCounts& c, bool flip) {
  const auto errors = flip ? c.n[kPlusPlus] + c.n[kMinusMinus] : c.n[kPlusMinus] + c.n[kMinusPlus];
  return static_cast<double>(errors) / static_cast<double>(c.total());
}

double error_rate(const JointDistribution& d, bool flip) {
  return flip ? d.p[kPlusPlus] + d.p[kMinusMinus] : d.p[kPlusMinus] + d.p[kMinusPlus];
}

SweepRow run_point(const SweepSpec& spec, std::size_t index) {
  const double value = spec.grid[index];
  const PointModel pm = point_model(spec, value);
  const TwoQubitState state = apply_channel(generate(pm.source), pm.channel);
  const double eve = pm.channel.eve_fraction();
  const TwoQubitState expected = eve > 0.0 ? intercept_average(state, eve) : state;
  const ChshSettings settings = ChshSettings::canonical(spec.label);
  const ProtocolBases bases = protocol_bases(spec.protocol, spec.label);
  const std::uint64_t point_seed = derive_seed(spec.seed, index);

  SweepRow row;
  row.param = value;
  row.S_analytic = s_analytic(expected, settings).S;

  // Inner sampling stays serial: points are the parallel unit.
  CoincidenceTable table;
  const auto pairs = settings.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    table.add({a, b,
               sample_outcomes_intercepted(state, a, b, spec.det, spec.n_pairs, eve, derive_seed(point_seed, i),
                                           Execution::Serial),
               "point"});
  }
  const ChshEstimate chsh = s_from_counts(table, settings);
  row.S_sampled = chsh.S;
  row.sigma_S = chsh.sigma_S;

  double var = 0.0;
  for (std::size_t k = 0; k < bases.key.size(); ++k) {
    const auto& key = bases.key[k];
    const AnalyzerSetting& a = bases.alice[key.alice];
    const AnalyzerSetting& b = bases.bob[key.bob];
    row.qber_analytic += error_rate(joint_probabilities(expected, a, b), key.flip) / bases.key.size();
    const OutcomeCounts c = sample_outcomes_intercepted(state, a, b, spec.det, spec.n_pairs, eve,
                                                        derive_seed(point_seed, 4 + k), Execution::Serial);
    if (c.total() == 0) throw ValidationError("sweep: no coincidences in a key basis; raise n_pairs");
    const double q = error_rate(c, key.flip);
    row.qber_basis.push_back(q);
    var += q * (1.0 - q) / static_cast<double>(c.total());
  }
  const double nb = static_cast<double>(row.qber_basis.size());
  for (double q : row.qber_basis) row.qber += q / nb;
  row.sigma_qber = std::sqrt(var) / nb;
  row.S_model = s_model(std::min(row.qber, 0.5));

  row.I_AB = mi_alice_bob(row.qber_basis.at(0), row.qber_basis.at(1));
  row.I_AE = mi_alice_eve(std::min(row.S_sampled, kTsirelson)).bits;
  row.r = key_rate(row.I_AB, row.I_AE);
  return row;
}

}  // namespace

std::string_view to_string(Mechanism m) noexcept {
  switch (m) {
    case Mechanism::Werner: return "werner";
    case Mechanism::Imbalance: return "imbalance";
    case Mechanism::HomVisibility: return "hom_visibility";
    case Mechanism::InterceptFraction: return "intercept_fraction";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view text) {
  const std::string k = lower(text);
  if (k == "werner") return Mechanism::Werner;
  if (k == "imbalance") return Mechanism::Imbalance;
  if (k == "hom_visibility" || k == "hom") return Mechanism::HomVisibility;
  if (k == "intercept_fraction" || k == "intercept") return Mechanism::InterceptFraction;
  throw ConfigError("mechanism", "unknown mechanism '" + std::string(text) + "'");
}

std::string_view to_string(SweepOutput o) noexcept {
  switch (o) {
    case SweepOutput::S: return "S";
    case SweepOutput::QBER: return "QBER";
    case SweepOutput::I_AB: return "I_AB";
    case SweepOutput::I_AE: return "I_AE";
    case SweepOutput::r: return "r";
  }
  return "?";
}

SweepOutput parse_sweep_output(std::string_view text) {
  for (SweepOutput o : {SweepOutput::S, SweepOutput::QBER, SweepOutput::I_AB, SweepOutput::I_AE, SweepOutput::r}) {
    if (lower(to_string(o)) == lower(text)) return o;
  }
  throw ConfigError("outputs", "unknown output '" + std::string(text) + "'");
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ConfigError("grid", "sweep grid is empty");
  if (n_pairs < 1) throw ConfigError("n_pairs", "must be >= 1");
  if (outputs.empty()) throw ConfigError("outputs", "no outputs requested");
  const double hi = mechanism == Mechanism::Imbalance ? std::numbers::pi / 2.0 : 1.0;
  for (double v : grid) {
    if (!(v >= 0.0 && v <= hi)) {
      throw ConfigError("grid", "value " + format_double(v) + " outside [0, " + format_double(hi) + "] for " +
                                    std::string(to_string(mechanism)));
    }
  }
  try {
    det.validate();
  } catch (const DomainError& e) {
    throw ConfigError("detector", e.what());
  }
}

PointModel point_model(const SweepSpec& spec, double value) {
  PointModel pm;
  pm.source.label = spec.label;
  switch (spec.mechanism) {
    case Mechanism::Werner: pm.channel = ChannelModel::werner(value); break;
    case Mechanism::Imbalance: pm.source.epsilon = value; break;
    case Mechanism::HomVisibility: pm.source.hom_visibility = value; break;
    case Mechanism::InterceptFraction: pm.channel = ChannelModel::intercept_resend(value); break;
  }
  return pm;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, Execution exec) {
  spec.validate();
  const auto n = static_cast<std::int64_t>(spec.grid.size());
  std::vector<SweepRow> rows(spec.grid.size());
  if (exec == Execution::Serial) {
    for (std::int64_t i = 0; i < n; ++i) rows[i] = run_point(spec, static_cast<std::size_t>(i));
    return rows;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)] = run_point(spec, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<std::string> sweep_columns(const SweepSpec& spec) {
  std::vector<std::string> cols{"mechanism_param"};
  if (wants(spec, SweepOutput::S)) {
    for (const char* c : {"S_analytic", "S_sampled", "sigma_S", "S_model"}) cols.emplace_back(c);
  }
  if (wants(spec, SweepOutput::QBER)) {
    for (const char* c : {"qber_analytic", "qber", "sigma_qber", "qber_basis1", "qber_basis2"}) cols.emplace_back(c);
  }
  if (wants(spec, SweepOutput::I_AB)) cols.emplace_back("I_AB");
  if (wants(spec, SweepOutput::I_AE)) cols.emplace_back("I_AE");
  if (wants(spec, SweepOutput::r)) cols.emplace_back("r");
  return cols;
}

void write_sweep_table(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows, char delimiter) {
  out << "# " << kSweepFormatTag << " mechanism=" << to_string(spec.mechanism)
      << " protocol=" << to_string(spec.protocol) << " state=" << to_string(spec.label)
      << " n_pairs=" << spec.n_pairs << " efficiency=" << format_double(spec.det.efficiency)
      << " seed=" << spec.seed << "\n";
  const auto cols = sweep_columns(spec);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? std::string(1, delimiter) : "") << cols[i];
  out << "\n";
  for (const SweepRow& r : rows) {
    std::vector<double> values{r.param};
    if (wants(spec, SweepOutput::S)) values.insert(values.end(), {r.S_analytic, r.S_sampled, r.sigma_S, r.S_model});
    if (wants(spec, SweepOutput::QBER)) {
      values.insert(values.end(), {r.qber_analytic, r.qber, r.sigma_qber, r.qber_basis.at(0), r.qber_basis.at(1)});
    }
    if (wants(spec, SweepOutput::I_AB)) values.push_back(r.I_AB);
    if (wants(spec, SweepOutput::I_AE)) values.push_back(r.I_AE);
    if (wants(spec, SweepOutput::r)) values.push_back(r.r);
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? std::string(1, delimiter) : "") << format_double(values[i]);
    out << "\n";
  }
}

std::size_t SweepTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ValidationError("sweep table has no column '" + std::string(name) + "'");
}

SweepTable read_sweep_table(std::istream& in) {
  SweepTable t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# " + std::string(kSweepFormatTag), 0) != 0) {
    throw ValidationError("sweep table: missing '# " + std::string(kSweepFormatTag) + "' tag line");
  }
  t.tag_line = line;
  if (!std::getline(in, line)) throw ValidationError("sweep table: missing header");
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  auto split = [delim](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, delim)) parts.push_back(item);
    return parts;
  };
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line);
    if (parts.size() != t.columns.size()) throw ValidationError("sweep table: ragged row");
    std::vector<double> row;
    for (const auto& p : parts) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
      if (ec != std::errc{} || ptr != p.data() + p.size()) throw ValidationError("sweep table: bad number '" + p + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace qkdsim
