// qkdsim: command-line front end.
//
//   qkdsim sweep      --mechanism werner --grid 0.7:1.0:0.05 [--config spec.json] [--out table.csv]
//   qkdsim session    config.json [--seed N] [--n-pairs N] [--emit-keys] [--format json|kv]
//   qkdsim thresholds [--mi-curve] [--format json|kv]
//   qkdsim analyze    counts.txt [--protocol BBM92] [--subtract-accidentals]
//
// Settings come from defaults, then the config file, then flags.
// Exit codes: 0 ok, 2 usage or config, 3 I/O, 4 validation, 1 anything else.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdsim/config.hpp"
#include "qkdsim/errors.hpp"
#include "qkdsim/ingest.hpp"
#include "qkdsim/report.hpp"
#include "qkdsim/security.hpp"
#include "qkdsim/sweep.hpp"

namespace {

using namespace qkdsim;

enum Exit : int { kOk = 0, kUnexpected = 1, kUsage = 2, kIo = 3, kValidation = 4 };

double parse_number(std::string_view text, const std::string& field) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(field, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

// "0.7,0.8,0.9" or "start:stop:step" (stop included when hit within step/1e6).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(parse_number(item, "grid"));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ConfigError("grid", "range must be start:stop:step with step > 0 and stop >= start");
    }
    const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-6));
    for (long i = 0; i <= n; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return grid;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) grid.push_back(parse_number(item, "grid"));
  }
  return grid;
}

std::vector<SweepOutput> parse_outputs(const std::string& text) {
  std::vector<SweepOutput> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    out.push_back(parse_sweep_output(item));
  }
  return out;
}

template <class T, class F>
T as_config(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output '" + out_path + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + out_path + "'");
}

struct SweepArgs {
  std::string config;
  std::string mechanism;
  std::string grid;
  std::optional<std::uint64_t> n_pairs;
  std::string protocol;
  std::string state;
  std::optional<double> efficiency;
  std::optional<double> dark_rate;
  std::string outputs;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::string out;
  bool serial = false;
};

int cmd_sweep(const SweepArgs& args) {
  SweepSpec spec;
  if (!args.config.empty()) spec = sweep_spec_from_json(load_json_config(args.config));
  if (!args.mechanism.empty()) spec.mechanism = parse_mechanism(args.mechanism);
  if (!args.grid.empty()) spec.grid = parse_grid(args.grid);
  if (args.n_pairs) spec.n_pairs = *args.n_pairs;
  if (!args.protocol.empty()) spec.protocol = as_config<ProtocolKind>("protocol", [&] { return parse_protocol(args.protocol); });
  if (!args.state.empty()) spec.label = as_config<BellLabel>("state", [&] { return parse_bell_label(args.state); });
  if (args.efficiency) spec.det.efficiency = *args.efficiency;
  if (args.dark_rate) spec.det.dark_rate = *args.dark_rate;
  if (!args.outputs.empty()) spec.outputs = parse_outputs(args.outputs);
  if (args.seed) spec.seed = *args.seed;
  if (args.format != "csv" && args.format != "tsv") throw ConfigError("format", "expected csv or tsv");
  spec.validate();

  const auto rows = run_sweep(spec, args.serial ? Execution::Serial : Execution::Parallel);
  std::ostringstream out;
  write_sweep_table(out, spec, rows, args.format == "tsv" ? '\t' : ',');
  emit(out.str(), args.out);
  return kOk;
}

struct SessionArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_pairs;
  bool emit_keys = false;
  bool serial = false;
  std::string format = "json";
  std::string out;
};

int cmd_session(const SessionArgs& args) {
  SessionConfig cfg = session_config_from_json(load_json_config(args.config));
  if (args.seed) cfg.seed = *args.seed;
  if (args.n_pairs) {
    if (*args.n_pairs < 1) throw ConfigError("n_pairs", "must be >= 1");
    cfg.n_pairs = *args.n_pairs;
  }
  const ReportFormat format = as_config<ReportFormat>("format", [&] { return parse_report_format(args.format); });

  const SessionRecord rec = run_session(cfg, args.serial ? Execution::Serial : Execution::Parallel);
  const SecurityReport sec = session_security(rec);
  emit(render(session_report(cfg, rec, sec, args.emit_keys), format), args.out);
  return kOk;
}

struct ThresholdArgs {
  bool mi_curve = false;
  double curve_step = 0.005;
  std::string format = "json";
  std::string out;
};

int cmd_thresholds(const ThresholdArgs& args) {
  const ReportFormat format = as_config<ReportFormat>("format", [&] { return parse_report_format(args.format); });
  auto doc = thresholds_report(thresholds());
  if (args.mi_curve) {
    if (!(args.curve_step > 0.0 && args.curve_step <= 0.1)) throw ConfigError("curve-step", "must lie in (0, 0.1]");
    std::vector<double> deltas;
    const auto n = static_cast<int>(std::floor(0.1 / args.curve_step + 1e-9));
    for (int i = 0; i <= n; ++i) deltas.push_back(i * args.curve_step);
    auto curve = nlohmann::ordered_json::array();
    for (const auto& p : mi_curve(deltas)) {
      curve.push_back({{"delta", p.delta}, {"S", p.S}, {"I_AB", p.I_AB}, {"I_AE", p.I_AE}, {"r", p.r}});
    }
    doc["mi_curve"] = curve;
  }
  emit(render(doc, format), args.out);
  return kOk;
}

struct AnalyzeArgs {
  std::string file;
  std::string preset = "canonical";
  std::string protocol = "BBM92";
  bool subtract_accidentals = false;
  std::string format = "json";
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args) {
  if (args.preset != "canonical") throw ConfigError("preset", "only 'canonical' is available");
  const ProtocolKind protocol = as_config<ProtocolKind>("protocol", [&] { return parse_protocol(args.protocol); });
  const ReportFormat format = as_config<ReportFormat>("format", [&] { return parse_report_format(args.format); });

  const CountRecordFile file = parse_counts_file(args.file);
  AnalysisOptions options;
  options.subtract_accidentals = args.subtract_accidentals;
  if (options.subtract_accidentals && !file.coincidence_window_s) {
    throw ConfigError("subtract-accidentals", "file has no @coincidence_window_s");
  }
  const AnalysisResult result = analyze_counts(file, ChshSettings::canonical(file.label), protocol, options);
  emit(render(analysis_report(args.file, file, result, protocol), format), args.out);
  return kOk;
}

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "qkdsim: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-based QKD simulator and security analysis"};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Sweep a degradation mechanism and write a table");
  sw->add_option("--config", sweep.config, "JSON sweep spec");
  sw->add_option("--mechanism", sweep.mechanism, "werner | imbalance | hom_visibility | intercept_fraction");
  sw->add_option("--grid", sweep.grid, "comma list or start:stop:step");
  sw->add_option("--n-pairs", sweep.n_pairs, "pairs per setting pair per point");
  sw->add_option("--protocol", sweep.protocol, "BBM92 | E91");
  sw->add_option("--state", sweep.state, "PhiPlus | PhiMinus | PsiPlus | PsiMinus");
  sw->add_option("--efficiency", sweep.efficiency, "detector efficiency per arm");
  sw->add_option("--dark-rate", sweep.dark_rate, "accidental coincidences per window");
  sw->add_option("--outputs", sweep.outputs, "comma list of S,QBER,I_AB,I_AE,r");
  sw->add_option("--seed", sweep.seed);
  sw->add_option("--format", sweep.format, "csv | tsv");
  sw->add_option("--out", sweep.out, "output path (default stdout)");
  sw->add_flag("--serial", sweep.serial, "run single-threaded");

  SessionArgs session;
  auto* se = app.add_subcommand("session", "Run one QKD session from a config file");
  se->add_option("config", session.config, "JSON session config (also searched in $QKDSIM_CONFIG_DIR)")->required();
  se->add_option("--seed", session.seed);
  se->add_option("--n-pairs", session.n_pairs);
  se->add_flag("--emit-keys", session.emit_keys, "include raw key bits in the report");
  se->add_flag("--serial", session.serial, "run single-threaded");
  se->add_option("--format", session.format, "json | kv");
  se->add_option("--out", session.out);

  ThresholdArgs thr;
  auto* th = app.add_subcommand("thresholds", "Print the QBER security thresholds");
  th->add_flag("--mi-curve", thr.mi_curve, "append I_AB, I_AE, r over delta in [0, 0.1]");
  th->add_option("--curve-step", thr.curve_step);
  th->add_option("--format", thr.format, "json | kv");
  th->add_option("--out", thr.out);

  AnalyzeArgs an;
  auto* az = app.add_subcommand("analyze", "Analyze a recorded count file");
  az->add_option("file", an.file)->required();
  az->add_option("--preset", an.preset, "analyzer preset (canonical)");
  az->add_option("--protocol", an.protocol, "BBM92 | E91");
  az->add_flag("--subtract-accidentals", an.subtract_accidentals);
  az->add_option("--format", an.format, "json | kv");
  az->add_option("--out", an.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sw->parsed()) return cmd_sweep(sweep);
    if (se->parsed()) return cmd_session(session);
    if (th->parsed()) return cmd_thresholds(thr);
    if (az->parsed()) return cmd_analyze(an);
  } catch (const ConfigError& e) {
    return report("config", e, kUsage);
  } catch (const IoError& e) {
    return report("io", e, kIo);
  } catch (const ValidationError& e) {
    return report("invalid data", e, kValidation);
  } catch (const std::exception& e) {
    return report("error", e, kUnexpected);
  }
  return kUsage;
}
