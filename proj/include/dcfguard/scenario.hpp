#pragma once

// Scenario files: YAML text <-> ScenarioConfig.
//
//   name: fig1
//   phy: dot11b-11M          # or dot11g-54M
//   payload_bytes: 1000
//   duration_s: 180
//   seed: 1
//   p_capture: 1.0
//   controller:
//     enabled: true
//     alpha: 0.1
//     update_period_s: 10
//     disassociation_threshold: 6
//     measurement_mode: realistic   # or oracle
//   estimator: {z_score: 1.96, epsilon: 0.01}
//   stations:
//     - id: 1
//       policy: cwmin-halved      # compliant, fixed-cw:16, aifs-sifs, large-txop:6413, scripted:0,0.5
//       traffic: saturated        # onoff:10,60  bernoulli:0.01  cbr:1e6
//       capture_priority: 0
//       join_time_s: 0
//       leave_time_s: 100
//     - id: 2
//       sessions: [[0, 100], [200, 300]]
//       forced_p_nack: 0.3
//       initial_penalty: 1.0
//
// Only `stations` and `duration_s` are required. Unknown keys are errors.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "dcfguard/config.hpp"
#include "dcfguard/error.hpp"
#include "dcfguard/policy.hpp"

namespace dcfguard {

namespace detail {

inline std::size_t line_of(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.is_null() ? 0 : static_cast<std::size_t>(m.line) + 1;
}

template <typename T>
T scalar_as(const YAML::Node& n, std::string_view key) {
  if (!n.IsScalar()) throw ConfigError("'" + std::string(key) + "' must be a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("invalid value '" + n.Scalar() + "' for '" + std::string(key) + "'", line_of(n));
  }
}

inline void reject_unknown(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                           std::string_view where) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + std::string(where), line_of(kv.first));
  }
}

template <typename F>
auto at_line(const YAML::Node& n, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), line_of(n));
  }
}

inline StationConfig parse_station(const YAML::Node& n) {
  if (!n.IsMap()) throw ConfigError("station entry must be a mapping", line_of(n));
  reject_unknown(n,
                 {"id", "policy", "traffic", "capture_priority", "join_time_s", "leave_time_s", "sessions",
                  "forced_p_nack", "initial_penalty"},
                 "station");
  StationConfig s;
  if (!n["id"]) throw ConfigError("station is missing required field 'id'", line_of(n));
  const auto id = scalar_as<long long>(n["id"], "id");
  if (id < 0 || id > 0xFFFFFFFFLL) throw ConfigError("station id out of range", line_of(n["id"]));
  s.id = static_cast<StationId>(id);
  if (const auto p = n["policy"]) s.policy = at_line(p, [&] { return parse_policy(scalar_as<std::string>(p, "policy")); });
  if (const auto t = n["traffic"])
    s.traffic = at_line(t, [&] { return parse_traffic(scalar_as<std::string>(t, "traffic")); });
  if (const auto c = n["capture_priority"]) s.capture_priority = scalar_as<int>(c, "capture_priority");
  if (n["sessions"] && (n["join_time_s"] || n["leave_time_s"]))
    throw ConfigError("use either 'sessions' or 'join_time_s'/'leave_time_s'", line_of(n["sessions"]));
  if (const auto ss = n["sessions"]) {
    if (!ss.IsSequence() || ss.size() == 0) throw ConfigError("'sessions' must be a non-empty list", line_of(ss));
    s.sessions.clear();
    for (const auto& item : ss) {
      if (!item.IsSequence() || item.size() < 1 || item.size() > 2)
        throw ConfigError("session must be [join_s] or [join_s, leave_s]", line_of(item));
      Session ses;
      ses.join_s = scalar_as<double>(item[0], "sessions");
      if (item.size() == 2) ses.leave_s = scalar_as<double>(item[1], "sessions");
      s.sessions.push_back(ses);
    }
  } else {
    Session ses;
    if (const auto j = n["join_time_s"]) ses.join_s = scalar_as<double>(j, "join_time_s");
    if (const auto l = n["leave_time_s"]) ses.leave_s = scalar_as<double>(l, "leave_time_s");
    s.sessions = {ses};
  }
  if (const auto f = n["forced_p_nack"]) s.forced_p_nack = scalar_as<double>(f, "forced_p_nack");
  if (const auto p0 = n["initial_penalty"]) s.initial_penalty = scalar_as<double>(p0, "initial_penalty");
  return s;
}

}  // namespace detail

/// Parses and validates a scenario. Errors carry the 1-based line number.
inline ScenarioConfig parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, static_cast<std::size_t>(e.mark.line) + 1);
  }
  if (!root.IsMap()) throw ConfigError("scenario must be a mapping", detail::line_of(root));
  detail::reject_unknown(root,
                         {"name", "phy", "payload_bytes", "duration_s", "seed", "p_capture", "controller", "estimator",
                          "stations"},
                         "scenario");
  using detail::scalar_as;
  ScenarioConfig cfg;
  if (const auto n = root["name"]) cfg.name = scalar_as<std::string>(n, "name");
  if (const auto n = root["phy"]) {
    cfg.phy_preset = scalar_as<std::string>(n, "phy");
    if (cfg.phy_preset != "dot11b-11M" && cfg.phy_preset != "dot11g-54M")
      throw ConfigError("unknown phy '" + cfg.phy_preset + "'", detail::line_of(n));
    cfg.payload_bytes = cfg.phy_preset == "dot11g-54M" ? 1500 : 1000;
  }
  if (const auto n = root["payload_bytes"]) cfg.payload_bytes = scalar_as<int>(n, "payload_bytes");
  if (!root["duration_s"]) throw ConfigError("missing required field 'duration_s'", detail::line_of(root));
  cfg.duration_s = scalar_as<double>(root["duration_s"], "duration_s");
  if (!(cfg.duration_s > 0.0)) throw ConfigError("duration_s must be positive", detail::line_of(root["duration_s"]));
  if (const auto n = root["seed"]) cfg.seed = scalar_as<std::uint64_t>(n, "seed");
  if (const auto n = root["p_capture"]) {
    cfg.p_capture = scalar_as<double>(n, "p_capture");
    if (!(cfg.p_capture >= 0.0 && cfg.p_capture <= 1.0)) throw ConfigError("p_capture must be in [0, 1]", detail::line_of(n));
  }

  if (const auto c = root["controller"]) {
    if (!c.IsMap()) throw ConfigError("'controller' must be a mapping", detail::line_of(c));
    detail::reject_unknown(c, {"enabled", "alpha", "update_period_s", "disassociation_threshold", "measurement_mode"},
                           "controller");
    if (const auto n = c["enabled"]) cfg.policing = scalar_as<bool>(n, "enabled");
    if (const auto n = c["alpha"]) cfg.controller.alpha = scalar_as<double>(n, "alpha");
    if (const auto n = c["update_period_s"]) cfg.controller.update_period_s = scalar_as<double>(n, "update_period_s");
    if (const auto n = c["disassociation_threshold"])
      cfg.controller.disassociation_threshold = scalar_as<int>(n, "disassociation_threshold");
    if (const auto n = c["measurement_mode"])
      cfg.measurement_mode =
          detail::at_line(n, [&] { return parse_measurement_mode(scalar_as<std::string>(n, "measurement_mode")); });
    detail::at_line(c, [&] { cfg.controller.validate(); });
  }
  if (const auto e = root["estimator"]) {
    if (!e.IsMap()) throw ConfigError("'estimator' must be a mapping", detail::line_of(e));
    detail::reject_unknown(e, {"z_score", "epsilon"}, "estimator");
    if (const auto n = e["z_score"]) cfg.estimator.z_score = scalar_as<double>(n, "z_score");
    if (const auto n = e["epsilon"]) cfg.estimator.epsilon = scalar_as<double>(n, "epsilon");
    detail::at_line(e, [&] { cfg.estimator.validate(); });
  }

  const auto st = root["stations"];
  if (!st) throw ConfigError("missing required field 'stations'", detail::line_of(root));
  if (!st.IsSequence()) throw ConfigError("'stations' must be a list", detail::line_of(st));
  std::set<StationId> seen;
  for (const auto& item : st) {
    StationConfig s = detail::parse_station(item);
    if (!seen.insert(s.id).second)
      throw ConfigError("duplicate station id " + std::to_string(s.id), detail::line_of(item["id"]));
    ScenarioConfig probe;
    probe.stations = {s};
    try {
      probe.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), detail::line_of(item));
    }
    cfg.stations.push_back(std::move(s));
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), detail::line_of(root));
  }
  return cfg;
}

/// Canonical text form: every field written, fixed key order.
inline std::string serialize_scenario(const ScenarioConfig& cfg) {
  auto num = [](double v) { return detail::format_number(v); };
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << cfg.name;
  out << YAML::Key << "phy" << YAML::Value << cfg.phy_preset;
  out << YAML::Key << "payload_bytes" << YAML::Value << cfg.payload_bytes;
  out << YAML::Key << "duration_s" << YAML::Value << num(cfg.duration_s);
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "p_capture" << YAML::Value << num(cfg.p_capture);
  out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << cfg.policing;
  out << YAML::Key << "alpha" << YAML::Value << num(cfg.controller.alpha);
  out << YAML::Key << "update_period_s" << YAML::Value << num(cfg.controller.update_period_s);
  out << YAML::Key << "disassociation_threshold" << YAML::Value << cfg.controller.disassociation_threshold;
  out << YAML::Key << "measurement_mode" << YAML::Value << std::string(to_string(cfg.measurement_mode));
  out << YAML::EndMap;
  out << YAML::Key << "estimator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "z_score" << YAML::Value << num(cfg.estimator.z_score);
  out << YAML::Key << "epsilon" << YAML::Value << num(cfg.estimator.epsilon);
  out << YAML::EndMap;
  out << YAML::Key << "stations" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : cfg.stations) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << s.id;
    out << YAML::Key << "policy" << YAML::Value << policy_name(s.policy);
    out << YAML::Key << "traffic" << YAML::Value << traffic_name(s.traffic);
    out << YAML::Key << "capture_priority" << YAML::Value << s.capture_priority;
    if (s.sessions.size() == 1) {
      out << YAML::Key << "join_time_s" << YAML::Value << num(s.sessions[0].join_s);
      if (std::isfinite(s.sessions[0].leave_s))
        out << YAML::Key << "leave_time_s" << YAML::Value << num(s.sessions[0].leave_s);
    } else {
      out << YAML::Key << "sessions" << YAML::Value << YAML::BeginSeq;
      for (const auto& ses : s.sessions) {
        out << YAML::Flow << YAML::BeginSeq << num(ses.join_s);
        if (std::isfinite(ses.leave_s)) out << num(ses.leave_s);
        out << YAML::EndSeq;
      }
      out << YAML::EndSeq;
    }
    if (s.forced_p_nack) out << YAML::Key << "forced_p_nack" << YAML::Value << num(*s.forced_p_nack);
    if (s.initial_penalty) out << YAML::Key << "initial_penalty" << YAML::Value << num(*s.initial_penalty);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace dcfguard
