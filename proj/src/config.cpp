#include "qkdsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "qkdsim/errors.hpp"

namespace qkdsim {
namespace {

using json = nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void only_keys(const json& obj, const std::string& prefix, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(join(prefix, it.key()), "unknown field");
  }
}

double number(const json& obj, const std::string& prefix, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(prefix, key), "expected a number");
  return v.get<double>();
}

std::uint64_t integer(const json& obj, const std::string& prefix, const std::string& key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(join(prefix, key), "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string text(const json& obj, const std::string& prefix, const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(prefix, key), "expected a string");
  return v.get<std::string>();
}

// Re-raises domain errors from value constructors as ConfigError on `field`.
template <class F>
auto guarded(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  }
}

DetectorModel detector_from(const json& doc, const std::string& prefix) {
  DetectorModel det;
  if (!doc.contains("detector")) return det;
  const json& d = doc.at("detector");
  const std::string p = join(prefix, "detector");
  only_keys(d, p, {"efficiency", "efficiency_b", "dark_rate", "window_pairs"});
  det.efficiency = number(d, p, "efficiency", det.efficiency);
  if (d.contains("efficiency_b")) det.efficiency_b = number(d, p, "efficiency_b", det.efficiency);
  det.dark_rate = number(d, p, "dark_rate", det.dark_rate);
  det.window_pairs = integer(d, p, "window_pairs", det.window_pairs);
  guarded(p, [&] { det.validate(); return 0; });
  return det;
}

ChannelModel channel_from(const json& c) {
  only_keys(c, "channel", {"kind", "p", "arm", "visibility", "fraction"});
  const std::string kind = text(c, "channel", "kind", "identity");
  if (kind == "identity") return ChannelModel::identity();
  if (kind == "werner") {
    if (!c.contains("visibility")) throw ConfigError("channel.visibility", "required for kind werner");
    return guarded("channel.visibility", [&] { return ChannelModel::werner(number(c, "channel", "visibility", 1.0)); });
  }
  if (kind == "depolarizing") {
    const std::string arm = text(c, "channel", "arm", "A");
    Arm a = Arm::A;
    if (arm == "B") a = Arm::B;
    else if (arm == "both") a = Arm::Both;
    else if (arm != "A") throw ConfigError("channel.arm", "expected A, B or both");
    return guarded("channel.p", [&] { return ChannelModel::depolarizing(number(c, "channel", "p", 0.0), a); });
  }
  if (kind == "intercept_resend") {
    return guarded("channel.fraction",
                   [&] { return ChannelModel::intercept_resend(number(c, "channel", "fraction", 0.0)); });
  }
  throw ConfigError("channel.kind", "unknown channel kind '" + kind + "'");
}

}  // namespace

SessionConfig session_config_from_json(const json& doc) {
  only_keys(doc, "", {"protocol", "source", "channel", "detector", "n_pairs", "qber_sample_fraction", "seed"});
  SessionConfig cfg;
  if (doc.contains("protocol")) {
    cfg.kind = guarded("protocol", [&] { return parse_protocol(text(doc, "", "protocol", "BBM92")); });
  }
  if (doc.contains("source")) {
    const json& s = doc.at("source");
    only_keys(s, "source", {"state", "epsilon", "hom_visibility"});
    if (s.contains("state")) {
      cfg.source.label = guarded("source.state", [&] { return parse_bell_label(text(s, "source", "state", "")); });
    }
    cfg.source.epsilon = number(s, "source", "epsilon", cfg.source.epsilon);
    cfg.source.hom_visibility = number(s, "source", "hom_visibility", cfg.source.hom_visibility);
    guarded("source", [&] { cfg.source.validate(); return 0; });
  }
  if (doc.contains("channel")) cfg.channel = channel_from(doc.at("channel"));
  cfg.det = detector_from(doc, "");
  cfg.n_pairs = integer(doc, "", "n_pairs", cfg.n_pairs);
  if (cfg.n_pairs < 1) throw ConfigError("n_pairs", "must be >= 1");
  cfg.qber_sample_fraction = number(doc, "", "qber_sample_fraction", cfg.qber_sample_fraction);
  if (!(cfg.qber_sample_fraction > 0.0 && cfg.qber_sample_fraction < 1.0)) {
    throw ConfigError("qber_sample_fraction", "must lie in (0, 1)");
  }
  cfg.seed = integer(doc, "", "seed", cfg.seed);
  return cfg;
}

SweepSpec sweep_spec_from_json(const json& doc) {
  only_keys(doc, "", {"mechanism", "grid", "n_pairs", "protocol", "state", "detector", "outputs", "seed"});
  SweepSpec spec;
  if (doc.contains("mechanism")) spec.mechanism = parse_mechanism(text(doc, "", "mechanism", "werner"));
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (!g.is_array()) throw ConfigError("grid", "expected an array of numbers");
    spec.grid.clear();
    for (const auto& v : g) {
      if (!v.is_number()) throw ConfigError("grid", "expected an array of numbers");
      spec.grid.push_back(v.get<double>());
    }
  }
  spec.n_pairs = integer(doc, "", "n_pairs", spec.n_pairs);
  if (doc.contains("protocol")) {
    spec.protocol = guarded("protocol", [&] { return parse_protocol(text(doc, "", "protocol", "BBM92")); });
  }
  if (doc.contains("state")) {
    spec.label = guarded("state", [&] { return parse_bell_label(text(doc, "", "state", "")); });
  }
  spec.det = detector_from(doc, "");
  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    if (!o.is_array()) throw ConfigError("outputs", "expected an array of strings");
    spec.outputs.clear();
    for (const auto& v : o) {
      if (!v.is_string()) throw ConfigError("outputs", "expected an array of strings");
      spec.outputs.push_back(parse_sweep_output(v.get<std::string>()));
    }
  }
  spec.seed = integer(doc, "", "seed", spec.seed);
  return spec;
}

json load_json_config(const std::filesystem::path& path) {
  std::filesystem::path resolved = path;
  if (!std::filesystem::exists(resolved) && path.is_relative()) {
    if (const char* dir = std::getenv(kConfigDirEnv)) {
      const auto candidate = std::filesystem::path(dir) / path;
      if (std::filesystem::exists(candidate)) resolved = candidate;
    }
  }
  std::ifstream in(resolved);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace qkdsim
