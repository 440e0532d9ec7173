#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "qkdsim/chsh.hpp"
#include "qkdsim/ingest.hpp"
#include "qkdsim/protocol.hpp"
#include "qkdsim/security.hpp"

namespace qkdsim {

inline constexpr std::string_view kReportFormat = "qkdsim-report/1";

enum class ReportFormat { Json, KeyValue };
ReportFormat parse_report_format(std::string_view text);

nlohmann::ordered_json to_json(const ChshEstimate& e);
nlohmann::ordered_json to_json(const SecurityReport& r);
nlohmann::ordered_json to_json(const Thresholds& t);

/// Key bits are included only when `emit_keys` is set.
nlohmann::ordered_json session_report(const SessionConfig& cfg, const SessionRecord& rec,
                                      const SecurityReport& security, bool emit_keys);
nlohmann::ordered_json analysis_report(const std::string& source, const CountRecordFile& file,
                                       const AnalysisResult& result, ProtocolKind protocol);
nlohmann::ordered_json thresholds_report(const Thresholds& t);

/// Json: pretty-printed document. KeyValue: one "dotted.key = value" per line.
std::string render(const nlohmann::ordered_json& doc, ReportFormat format);

}  // namespace qkdsim
