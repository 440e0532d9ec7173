#include "qkdsim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "qkdsim/errors.hpp"
#include "qkdsim/seeding.hpp"

namespace qkdsim {
namespace {

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::string_view trim(std::string_view s, std::size_t* offset = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  std::size_t e = s.size();
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  if (offset) *offset += b;
  return s.substr(b, e - b);
}

std::vector<Field> split_fields(std::string_view line, char sep) {
  std::vector<Field> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    const std::string_view raw = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    std::size_t col = start;
    const std::string_view t = trim(raw, &col);
    out.push_back({t, col + 1});
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class LineParser {
 public:
  LineParser(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(std::size_t column, const std::string& message) const {
    throw ParseError(source_, line_, column, message);
  }

  double decimal(const Field& f, const char* what) const {
    if (f.text.empty()) fail(f.column, std::string("missing ") + what);
    if (f.text.front() == '+') fail(f.column, std::string(what) + ": leading '+' not allowed");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), value);
    if (ec != std::errc{} || ptr != f.text.data() + f.text.size() || !std::isfinite(value)) {
      fail(f.column, std::string(what) + ": '" + std::string(f.text) + "' is not a finite decimal");
    }
    return value;
  }

  std::uint64_t count(const Field& f, const char* what) const {
    if (f.text.empty()) fail(f.column, std::string("missing ") + what);
    if (f.text.front() == '-') fail(f.column, std::string(what) + ": negative count '" + std::string(f.text) + "'");
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), value);
    if (ec != std::errc{} || ptr != f.text.data() + f.text.size()) {
      fail(f.column, std::string(what) + ": '" + std::string(f.text) + "' is not a nonnegative integer");
    }
    return value;
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool same_projector(double hwp_x, double hwp_y) {
  return AnalyzerSetting::from_hwp(hwp_x).same_projector(AnalyzerSetting::from_hwp(hwp_y));
}

struct SettingPair {
  AnalyzerSetting a;
  AnalyzerSetting b;
  bool flip = false;  // key bases only
};

std::vector<SettingPair> chsh_pairs(const ChshSettings& s) {
  std::vector<SettingPair> out;
  for (const auto& [a, b] : s.pairs()) out.push_back({a, b, false});
  return out;
}

std::vector<SettingPair> key_pairs(ProtocolKind protocol, BellLabel label) {
  const ProtocolBases pb = protocol_bases(protocol, label);
  std::vector<SettingPair> out;
  for (const auto& k : pb.key) out.push_back({pb.alice[k.alice], pb.bob[k.bob], k.flip});
  return out;
}

// Projector rows of one setting pair in outcome order {++, +-, -+, --}.
std::array<std::pair<AnalyzerSetting, AnalyzerSetting>, 4> projector_rows(const SettingPair& p) {
  return {{{p.a, p.b}, {p.a, p.b.orthogonal()}, {p.a.orthogonal(), p.b}, {p.a.orthogonal(), p.b.orthogonal()}}};
}

const CountRecordRow* find_row(const CountRecordFile& file, const AnalyzerSetting& a, const AnalyzerSetting& b) {
  for (const auto& row : file.rows) {
    if (AnalyzerSetting::from_hwp(row.alice_hwp_deg).same_projector(a) &&
        AnalyzerSetting::from_hwp(row.bob_hwp_deg).same_projector(b)) {
      return &row;
    }
  }
  return nullptr;
}

std::string row_name(const AnalyzerSetting& a, const AnalyzerSetting& b) {
  return "(" + format_double(a.hwp_deg()) + ", " + format_double(b.hwp_deg()) + ")";
}

}  // namespace

CountRecordFile parse_counts(std::istream& in, const std::string& source_name) {
  CountRecordFile file;
  bool have_version = false, have_state = false, have_acq = false, have_columns = false;
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::size_t> row_lines;

  while (std::getline(in, raw)) {
    ++line_no;
    const LineParser lp(source_name, line_no);
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t offset = line_no == 1 && std::string_view(raw).starts_with("\xEF\xBB\xBF") ? 3 : 0;
    const std::string_view body = trim(line, &offset);
    if (body.empty()) continue;

    if (body.front() == '@') {
      if (have_columns) lp.fail(offset + 1, "directive after the column line");
      const std::size_t ws = body.find_first_of(" \t");
      const std::string_view key = body.substr(0, ws);
      std::size_t value_col = offset + (ws == std::string_view::npos ? body.size() : ws);
      const std::string_view value =
          ws == std::string_view::npos ? std::string_view{} : trim(body.substr(ws), &value_col);
      const Field vf{value, value_col + 1};
      if (value.empty()) lp.fail(offset + 1, "directive " + std::string(key) + " has no value");
      if (key == "@version") {
        if (have_version) lp.fail(offset + 1, "duplicate @version");
        have_version = true;
        if (value != "1") lp.fail(vf.column, "unknown format version '" + std::string(value) + "'");
        file.version = 1;
      } else if (key == "@state") {
        if (have_state) lp.fail(offset + 1, "duplicate @state");
        have_state = true;
        try {
          file.label = parse_bell_label(value);
        } catch (const DomainError& e) {
          lp.fail(vf.column, e.what());
        }
      } else if (key == "@acquisition_s") {
        if (have_acq) lp.fail(offset + 1, "duplicate @acquisition_s");
        have_acq = true;
        file.acquisition_s = lp.decimal(vf, "acquisition_s");
        if (!(file.acquisition_s > 0.0)) lp.fail(vf.column, "acquisition_s must be > 0");
      } else if (key == "@coincidence_window_s") {
        if (file.coincidence_window_s) lp.fail(offset + 1, "duplicate @coincidence_window_s");
        const double w = lp.decimal(vf, "coincidence_window_s");
        if (!(w > 0.0)) lp.fail(vf.column, "coincidence_window_s must be > 0");
        file.coincidence_window_s = w;
      } else {
        lp.fail(offset + 1, "unknown directive '" + std::string(key) + "'");
      }
      continue;
    }

    if (!have_columns) {
      if (!have_version) lp.fail(offset + 1, "missing @version before data");
      if (!have_state) lp.fail(offset + 1, "missing @state before data");
      if (!have_acq) lp.fail(offset + 1, "missing @acquisition_s before data");
      std::string compact;
      for (char c : body) if (c != ' ' && c != '\t') compact.push_back(c);
      if (compact != kCountColumns) {
        lp.fail(offset + 1, "expected column line '" + std::string(kCountColumns) + "'");
      }
      have_columns = true;
      continue;
    }

    const auto fields = split_fields(body, ',');
    if (fields.size() != 5) {
      lp.fail(offset + 1, "expected 5 comma-separated fields, found " + std::to_string(fields.size()));
    }
    CountRecordRow row;
    row.alice_hwp_deg = lp.decimal({fields[0].text, fields[0].column + offset}, "alice_hwp_deg");
    row.bob_hwp_deg = lp.decimal({fields[1].text, fields[1].column + offset}, "bob_hwp_deg");
    row.singles_a = lp.count({fields[2].text, fields[2].column + offset}, "singles_a");
    row.singles_b = lp.count({fields[3].text, fields[3].column + offset}, "singles_b");
    row.coincidences = lp.count({fields[4].text, fields[4].column + offset}, "coincidences");
    row.line = line_no;
    for (const auto& prev : file.rows) {
      if (same_projector(prev.alice_hwp_deg, row.alice_hwp_deg) &&
          same_projector(prev.bob_hwp_deg, row.bob_hwp_deg)) {
        lp.fail(offset + 1, "duplicate projector pair (" + std::string(fields[0].text) + ", " +
                                std::string(fields[1].text) + "), first seen on line " + std::to_string(prev.line));
      }
    }
    file.rows.push_back(row);
  }
  if (file.rows.empty()) {
    throw ParseError(source_name, line_no + 1, 1, "no rows");
  }
  return file;
}

CountRecordFile parse_counts(std::string_view text, const std::string& source_name) {
  std::istringstream in{std::string(text)};
  return parse_counts(in, source_name);
}

CountRecordFile parse_counts_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open count file '" + path.string() + "'");
  return parse_counts(in, path.string());
}

void write_counts(std::ostream& out, const CountRecordFile& file) {
  out << "# coincidence counts, one projector combination per row\n";
  out << "@version " << file.version << "\n";
  out << "@state " << to_string(file.label) << "\n";
  out << "@acquisition_s " << format_double(file.acquisition_s) << "\n";
  if (file.coincidence_window_s) out << "@coincidence_window_s " << format_double(*file.coincidence_window_s) << "\n";
  out << kCountColumns << "\n";
  for (const auto& r : file.rows) {
    out << format_double(r.alice_hwp_deg) << "," << format_double(r.bob_hwp_deg) << "," << r.singles_a << ","
        << r.singles_b << "," << r.coincidences << "\n";
  }
}

std::string write_counts(const CountRecordFile& file) {
  std::ostringstream os;
  write_counts(os, file);
  return os.str();
}

std::vector<std::pair<AnalyzerSetting, AnalyzerSetting>> required_rows(const ChshSettings& settings,
                                                                       ProtocolKind protocol, BellLabel label) {
  std::vector<std::pair<AnalyzerSetting, AnalyzerSetting>> out;
  auto add = [&](const SettingPair& p) {
    for (const auto& r : projector_rows(p)) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const auto& q) {
        return q.first.same_projector(r.first) && q.second.same_projector(r.second);
      });
      if (!seen) out.push_back(r);
    }
  };
  for (const auto& p : chsh_pairs(settings)) add(p);
  for (const auto& p : key_pairs(protocol, label)) add(p);
  return out;
}

AnalysisResult analyze_counts(const CountRecordFile& file, const ChshSettings& settings, ProtocolKind protocol,
                              const AnalysisOptions& options) {
  settings.validate();
  if (options.subtract_accidentals && !file.coincidence_window_s) {
    throw ValidationError("accidental subtraction requested but the file has no @coincidence_window_s");
  }
  std::vector<std::string> missing;
  for (const auto& [a, b] : required_rows(settings, protocol, file.label)) {
    if (find_row(file, a, b) == nullptr) missing.push_back(row_name(a, b));
  }
  if (!missing.empty()) {
    std::string msg = "incomplete count file: missing (alice_hwp_deg, bob_hwp_deg) rows";
    for (const auto& m : missing) msg += " " + m;
    throw IncompleteTableError(msg, missing);
  }

  auto coincidences = [&](const CountRecordRow& row) -> std::uint64_t {
    if (!options.subtract_accidentals) return row.coincidences;
    const double acc = static_cast<double>(row.singles_a) * static_cast<double>(row.singles_b) *
                       *file.coincidence_window_s / file.acquisition_s;
    return static_cast<std::uint64_t>(std::max(0.0, std::round(static_cast<double>(row.coincidences) - acc)));
  };
  auto quadruple = [&](const SettingPair& p) {
    OutcomeCounts c;
    const auto rows = projector_rows(p);
    for (int i = 0; i < 4; ++i) c.n[i] = coincidences(*find_row(file, rows[i].first, rows[i].second));
    return c;
  };

  AnalysisResult result;
  const std::string tag = format_double(file.acquisition_s) + " s";
  for (const auto& p : chsh_pairs(settings)) result.table.add({p.a, p.b, quadruple(p), tag});
  result.chsh = s_from_counts(result.table, settings);

  for (const auto& p : key_pairs(protocol, file.label)) {
    const OutcomeCounts c = quadruple(p);
    if (result.table.find(p.a, p.b) == nullptr) result.table.add({p.a, p.b, c, tag});
    BasisQber bq;
    bq.alice = p.a;
    bq.bob = p.b;
    bq.sifted = bq.disclosed = c.total();
    if (bq.sifted == 0) throw ValidationError("zero coincidences in key basis " + row_name(p.a, p.b));
    bq.errors = p.flip ? c.n[kPlusPlus] + c.n[kMinusMinus] : c.n[kPlusMinus] + c.n[kMinusPlus];
    bq.qber = static_cast<double>(bq.errors) / static_cast<double>(bq.sifted);
    result.per_basis.push_back(bq);
  }
  result.security = assess(result.per_basis.at(0).qber, result.per_basis.at(1).qber, result.chsh.S);
  return result;
}

CountRecordFile synthesize_counts(const SynthesisSpec& spec, const ChshSettings& settings, ProtocolKind protocol) {
  spec.det.validate();
  CountRecordFile file;
  file.label = spec.label;
  file.acquisition_s = spec.acquisition_s;

  std::vector<SettingPair> pairs = chsh_pairs(settings);
  for (const auto& p : key_pairs(protocol, spec.label)) pairs.push_back(p);

  const double eta2 = spec.det.eta_a() * spec.det.eta_b();
  const double n = static_cast<double>(spec.n_pairs_per_setting);
  const double dark = spec.det.accidentals_per_pair() * n;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const SettingPair& p = pairs[pi];
    const JointDistribution dist = joint_probabilities(spec.state, p.a, p.b);
    const std::uint64_t pair_seed = derive_seed(spec.seed, pi);
    OutcomeCounts counts;
    if (spec.mode == SynthesisMode::Sampled) {
      counts = sample_outcomes(spec.state, p.a, p.b, spec.det, spec.n_pairs_per_setting, pair_seed);
    }
    const auto rows = projector_rows(p);
    Rng rng(derive_seed(pair_seed, 7));
    for (int o = 0; o < 4; ++o) {
      const auto& [ra, rb] = rows[o];
      if (std::any_of(file.rows.begin(), file.rows.end(), [&](const CountRecordRow& r) {
            return AnalyzerSetting::from_hwp(r.alice_hwp_deg).same_projector(ra) &&
                   AnalyzerSetting::from_hwp(r.bob_hwp_deg).same_projector(rb);
          })) {
        continue;
      }
      const double mean = n * eta2 * dist.p[o] + dark / 4.0;
      const double pa = (o < 2 ? dist.alice_plus() : 1.0 - dist.alice_plus()) * spec.det.eta_a();
      const double pb = (o % 2 == 0 ? dist.bob_plus() : 1.0 - dist.bob_plus()) * spec.det.eta_b();
      CountRecordRow row;
      row.alice_hwp_deg = ra.hwp_deg();
      row.bob_hwp_deg = rb.hwp_deg();
      switch (spec.mode) {
        case SynthesisMode::Sampled: row.coincidences = counts.n[o]; break;
        case SynthesisMode::Expected: row.coincidences = static_cast<std::uint64_t>(std::llround(mean)); break;
        case SynthesisMode::Poisson:
          row.coincidences = mean > 0.0 ? std::poisson_distribution<std::uint64_t>(mean)(rng) : 0;
          break;
      }
      if (spec.mode == SynthesisMode::Expected) {
        row.singles_a = static_cast<std::uint64_t>(std::llround(n * std::clamp(pa, 0.0, 1.0)));
        row.singles_b = static_cast<std::uint64_t>(std::llround(n * std::clamp(pb, 0.0, 1.0)));
      } else {
        row.singles_a = std::binomial_distribution<std::uint64_t>(spec.n_pairs_per_setting, std::clamp(pa, 0.0, 1.0))(rng);
        row.singles_b = std::binomial_distribution<std::uint64_t>(spec.n_pairs_per_setting, std::clamp(pb, 0.0, 1.0))(rng);
      }
      file.rows.push_back(row);
    }
  }
  return file;
}

}  // namespace qkdsim
