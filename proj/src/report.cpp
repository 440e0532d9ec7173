#include "qkdsim/report.hpp"

#include <sstream>

#include "qkdsim/errors.hpp"

namespace qkdsim {
namespace {

using json = nlohmann::ordered_json;

json setting_json(const AnalyzerSetting& s) {
  return {{"hwp_deg", s.hwp_deg()}, {"polarization_deg", s.polarization_deg()}};
}

std::string bits_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

json basis_json(const BasisQber& b) {
  return {{"alice", setting_json(b.alice)}, {"bob", setting_json(b.bob)}, {"sifted", b.sifted},
          {"disclosed", b.disclosed},       {"errors", b.errors},           {"qber", b.qber}};
}

void flatten(const json& node, const std::string& prefix, std::ostringstream& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) flatten(node[i], prefix + "." + std::to_string(i), out);
  } else if (node.is_string()) {
    out << prefix << " = " << node.get<std::string>() << "\n";
  } else {
    out << prefix << " = " << node.dump() << "\n";
  }
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "kv") return ReportFormat::KeyValue;
  throw ConfigError("format", "unknown report format '" + std::string(text) + "' (expected json or kv)");
}

json to_json(const ChshEstimate& e) {
  return {{"S", e.S}, {"sigma_S", e.sigma_S}, {"E", e.E}, {"sigma_E", e.sigma_E}};
}

json to_json(const SecurityReport& r) {
  return {{"e_b", r.e_b},
          {"e_p", r.e_p},
          {"delta", r.delta},
          {"S_model", r.S_model},
          {"S_used", r.S_used},
          {"S_source", r.S_measured ? "measured" : "model"},
          {"S_clamped", r.S_clamped},
          {"sub_classical_S", r.sub_classical},
          {"I_AB", r.I_AB},
          {"I_AE", r.I_AE},
          {"r", r.r},
          {"verdicts",
           {{"individual_bound_ok", r.verdicts.individual_bound_ok},
            {"collective_bound_ok", r.verdicts.collective_bound_ok},
            {"mi_positive", r.verdicts.mi_positive}}}};
}

json to_json(const Thresholds& t) {
  return {{"delta_individual", t.delta_individual}, {"delta_collective", t.delta_collective},
          {"delta_mi_zero", t.delta_mi_zero},       {"S_at_collective", t.S_at_collective},
          {"S_at_mi_zero", t.S_at_mi_zero}};
}

json session_report(const SessionConfig& cfg, const SessionRecord& rec, const SecurityReport& security,
                    bool emit_keys) {
  json per_basis = json::array();
  for (const auto& b : rec.per_basis) per_basis.push_back(basis_json(b));
  json session = {{"protocol", to_string(rec.kind)},
                  {"state", to_string(rec.label)},
                  {"epsilon", cfg.source.epsilon},
                  {"hom_visibility", cfg.source.hom_visibility},
                  {"channel", cfg.channel.describe()},
                  {"efficiency", cfg.det.efficiency},
                  {"seed", cfg.seed},
                  {"n_pairs", rec.n_pairs},
                  {"coincidences", rec.coincidences},
                  {"accidentals", rec.accidentals},
                  {"sifted_length", rec.sifted_length},
                  {"disclosed_length", rec.disclosed_length},
                  {"retained_length", rec.retained_length},
                  {"qber_hat", rec.qber_hat},
                  {"qber_ci95", {rec.qber_ci_low, rec.qber_ci_high}},
                  {"per_basis", per_basis}};
  if (rec.chsh_subset) {
    session["chsh_subset"] = to_json(*rec.chsh_subset);
    session["chsh_events"] = rec.chsh_events;
  }
  if (emit_keys) {
    session["key_bits_alice"] = bits_string(rec.key_bits_alice);
    session["key_bits_bob"] = bits_string(rec.key_bits_bob);
  }
  return {{"format", kReportFormat}, {"kind", "session"}, {"session", session}, {"security", to_json(security)}};
}

json analysis_report(const std::string& source, const CountRecordFile& file, const AnalysisResult& result,
                     ProtocolKind protocol) {
  json per_basis = json::array();
  for (const auto& b : result.per_basis) per_basis.push_back(basis_json(b));
  return {{"format", kReportFormat},
          {"kind", "analysis"},
          {"source", source},
          {"state", to_string(file.label)},
          {"protocol", to_string(protocol)},
          {"rows", file.rows.size()},
          {"chsh", to_json(result.chsh)},
          {"per_basis", per_basis},
          {"security", to_json(result.security)}};
}

json thresholds_report(const Thresholds& t) {
  return {{"format", kReportFormat},
          {"kind", "thresholds"},
          {"thresholds", to_json(t)},
          {"methods",
           {{"delta_individual", "closed form: S = 2 sqrt2 (1 - 2 delta) = 2"},
            {"delta_collective", "bisection of 1 - 2 H(delta) on [0, 0.5], tol 1e-6"},
            {"delta_mi_zero", "bisection of 1 - 2 H(delta) - I_AE(S(delta)) on [0, 0.25], tol 1e-6"},
            {"S_at_collective", "S(delta) at delta = 0.11"},
            {"S_at_mi_zero", "S(delta) at delta_mi_zero"}}}};
}

std::string render(const json& doc, ReportFormat format) {
  if (format == ReportFormat::Json) return doc.dump(2) + "\n";
  std::ostringstream out;
  flatten(doc, "", out);
  return out.str();
}

}  // namespace qkdsim
