#pragma once

// Scenario description consumed by the simulator.

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dcfguard/analytics.hpp"
#include "dcfguard/controller.hpp"
#include "dcfguard/error.hpp"
#include "dcfguard/phy.hpp"
#include "dcfguard/policy.hpp"

namespace dcfguard {

namespace traffic {

struct Saturated {
  friend bool operator==(const Saturated&, const Saturated&) = default;
};

/// Saturated for `active_s`, then silent for an exponential time with mean `idle_mean_s`.
struct OnOff {
  double active_s = 10.0;
  double idle_mean_s = 60.0;
  friend bool operator==(const OnOff&, const OnOff&) = default;
};

/// One frame arrives per slot with the given probability.
struct Bernoulli {
  double arrival_prob_per_slot = 0.01;
  friend bool operator==(const Bernoulli&, const Bernoulli&) = default;
};

/// Constant bit rate: one payload-sized frame every payload_bits / bit_rate seconds.
struct Cbr {
  double bit_rate_bps = 1e6;
  friend bool operator==(const Cbr&, const Cbr&) = default;
};

}  // namespace traffic

using TrafficSource = std::variant<traffic::Saturated, traffic::OnOff, traffic::Bernoulli, traffic::Cbr>;

inline std::string traffic_name(const TrafficSource& t) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, traffic::Saturated>) return "saturated";
        if constexpr (std::is_same_v<S, traffic::OnOff>)
          return "onoff:" + detail::format_number(s.active_s) + "," + detail::format_number(s.idle_mean_s);
        if constexpr (std::is_same_v<S, traffic::Bernoulli>)
          return "bernoulli:" + detail::format_number(s.arrival_prob_per_slot);
        if constexpr (std::is_same_v<S, traffic::Cbr>) return "cbr:" + detail::format_number(s.bit_rate_bps);
      },
      t);
}

inline TrafficSource parse_traffic(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "saturated" && colon == std::string_view::npos) return traffic::Saturated{};
  if (head == "onoff" && !arg.empty()) {
    const auto comma = arg.find(',');
    if (comma == std::string_view::npos) throw DomainError("onoff needs active_s,idle_mean_s");
    traffic::OnOff o{detail::parse_number(arg.substr(0, comma), "onoff"),
                     detail::parse_number(arg.substr(comma + 1), "onoff")};
    if (!(o.active_s > 0 && o.idle_mean_s > 0)) throw DomainError("onoff durations must be positive");
    return o;
  }
  if (head == "bernoulli" && !arg.empty()) {
    traffic::Bernoulli b{detail::parse_number(arg, "bernoulli")};
    if (!(b.arrival_prob_per_slot > 0 && b.arrival_prob_per_slot <= 1))
      throw DomainError("bernoulli arrival probability must be in (0, 1]");
    return b;
  }
  if (head == "cbr" && !arg.empty()) {
    traffic::Cbr c{detail::parse_number(arg, "cbr")};
    if (!(c.bit_rate_bps > 0)) throw DomainError("cbr rate must be positive");
    return c;
  }
  throw DomainError("unknown traffic source '" + std::string(text) + "'");
}

enum class MeasurementMode {
  Oracle,     // true transmission attempts per slot, compared with g(f1)
  Realistic,  // frames received with a correct FCS per slot, compared with g(f1)(1 - f1)
};

inline std::string_view to_string(MeasurementMode m) { return m == MeasurementMode::Oracle ? "oracle" : "realistic"; }

inline MeasurementMode parse_measurement_mode(std::string_view s) {
  if (s == "oracle") return MeasurementMode::Oracle;
  if (s == "realistic") return MeasurementMode::Realistic;
  throw DomainError("unknown measurement mode '" + std::string(s) + "'");
}

inline constexpr double kForever = std::numeric_limits<double>::infinity();

/// Association interval [join_s, leave_s).
struct Session {
  double join_s = 0.0;
  double leave_s = kForever;
  friend bool operator==(const Session&, const Session&) = default;
};

struct StationConfig {
  StationId id = 0;
  BehaviourPolicy policy = policy::Compliant{};
  TrafficSource traffic = traffic::Saturated{};
  int capture_priority = 0;
  std::vector<Session> sessions{Session{}};
  std::optional<double> forced_p_nack;    // fixed suppression instead of the controller's
  std::optional<double> initial_penalty;  // p(0) injected at first association

  friend bool operator==(const StationConfig&, const StationConfig&) = default;
};

struct ScenarioConfig {
  std::string name = "custom";
  std::string phy_preset = "dot11b-11M";
  int payload_bytes = 1000;
  std::vector<StationConfig> stations;
  ControllerConfig controller;
  bool policing = true;
  MeasurementMode measurement_mode = MeasurementMode::Realistic;
  double p_capture = 1.0;
  double duration_s = 180.0;
  std::uint64_t seed = 1;
  EstimatorConfig estimator;

  PhyTiming phy() const { return dcfguard::phy_preset(phy_preset, payload_bytes); }

  void validate() const {
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be positive");
    if (payload_bytes <= 0) throw ConfigError("payload_bytes must be positive");
    if (!(p_capture >= 0.0 && p_capture <= 1.0)) throw ConfigError("p_capture must be in [0, 1]");
    try {
      (void)phy();
      controller.validate();
      estimator.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    std::set<StationId> ids;
    for (const auto& s : stations) {
      if (!ids.insert(s.id).second) throw ConfigError("duplicate station id " + std::to_string(s.id));
      if (s.sessions.empty()) throw ConfigError("station " + std::to_string(s.id) + " has no session");
      double last_leave = -1.0;
      for (const auto& ses : s.sessions) {
        if (!(ses.join_s >= 0.0 && ses.join_s < ses.leave_s))
          throw ConfigError("station " + std::to_string(s.id) + ": join must precede leave");
        if (ses.join_s < last_leave)
          throw ConfigError("station " + std::to_string(s.id) + ": sessions must be ordered and disjoint");
        last_leave = ses.leave_s;
      }
      if (s.capture_priority < 0) throw ConfigError("capture_priority must be >= 0");
      if (s.forced_p_nack && !(*s.forced_p_nack >= 0.0 && *s.forced_p_nack <= 1.0))
        throw ConfigError("forced_p_nack must be in [0, 1]");
      if (s.initial_penalty && !(*s.initial_penalty >= 0.0)) throw ConfigError("initial_penalty must be >= 0");
      try {
        (void)apply_policy(s.policy);
      } catch (const DomainError& e) {
        throw ConfigError("station " + std::to_string(s.id) + ": " + e.what());
      }
    }
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

}  // namespace dcfguard
