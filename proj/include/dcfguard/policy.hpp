#pragma once

// Station behaviour policies: the compliant baseline and the catalogue of
// MAC parameter manipulations a selfish client can apply.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "dcfguard/analytics.hpp"
#include "dcfguard/error.hpp"

namespace dcfguard {

namespace policy {

struct Compliant {
  friend bool operator==(const Compliant&, const Compliant&) = default;
};

/// CW_min = 16 with CW_max left at 1024, so backoff doubling stays intact.
struct CWminHalved {
  friend bool operator==(const CWminHalved&, const CWminHalved&) = default;
};

/// CW_min = CW_max = cw: binary exponential backoff disabled.
struct FixedCW {
  int cw = 16;
  friend bool operator==(const FixedCW&, const FixedCW&) = default;
};

/// Only SIFS after a busy medium before counting down.
struct AifsSifs {
  friend bool operator==(const AifsSifs&, const AifsSifs&) = default;
};

struct LargeTxop {
  double txop_us = 6413.0;
  friend bool operator==(const LargeTxop&, const LargeTxop&) = default;
};

/// Per-window relative deviation y(t) = x(t)/x̄ - 1 the station aims for.
struct Scripted {
  std::vector<double> y;
  friend bool operator==(const Scripted&, const Scripted&) = default;
};

}  // namespace policy

using BehaviourPolicy = std::variant<policy::Compliant, policy::CWminHalved, policy::FixedCW,
                                     policy::AifsSifs, policy::LargeTxop, policy::Scripted>;

/// MAC parameters the policy starts from. Scripted stations begin compliant
/// and are re-parameterised at every window boundary.
inline MacParams apply_policy(const BehaviourPolicy& policy, MacParams base = kCompliantParams) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, policy::CWminHalved>) {
          const int cw_max = base.cw_max();
          base.cw_min /= 2;
          int m = 0;
          while ((base.cw_min << m) < cw_max) ++m;
          base.max_backoff_stage = m;
        } else if constexpr (std::is_same_v<P, policy::FixedCW>) {
          base.cw_min = p.cw;
          base.max_backoff_stage = 0;
        } else if constexpr (std::is_same_v<P, policy::AifsSifs>) {
          base.aifs_slots = 0;
        } else if constexpr (std::is_same_v<P, policy::LargeTxop>) {
          base.txop_limit_us = p.txop_us;
        }
      },
      policy);
  base.validate();
  return base;
}

inline bool is_compliant(const BehaviourPolicy& p) { return std::holds_alternative<policy::Compliant>(p); }

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline double parse_number(std::string_view s, std::string_view context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw DomainError("invalid number '" + std::string(s) + "' in " + std::string(context));
  return v;
}

}  // namespace detail

/// Canonical text form: compliant, cwmin-halved, fixed-cw:16, aifs-sifs,
/// large-txop:6413, scripted:0,0.5,-0.5
inline std::string policy_name(const BehaviourPolicy& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, policy::Compliant>) return "compliant";
        if constexpr (std::is_same_v<P, policy::CWminHalved>) return "cwmin-halved";
        if constexpr (std::is_same_v<P, policy::FixedCW>) return "fixed-cw:" + std::to_string(p.cw);
        if constexpr (std::is_same_v<P, policy::AifsSifs>) return "aifs-sifs";
        if constexpr (std::is_same_v<P, policy::LargeTxop>) return "large-txop:" + detail::format_number(p.txop_us);
        if constexpr (std::is_same_v<P, policy::Scripted>) {
          std::string s = "scripted:";
          for (std::size_t i = 0; i < p.y.size(); ++i) s += (i ? "," : "") + detail::format_number(p.y[i]);
          return s;
        }
      },
      policy);
}

inline BehaviourPolicy parse_policy(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;
  if (head == "compliant" && !has_arg) return policy::Compliant{};
  if (head == "cwmin-halved" && !has_arg) return policy::CWminHalved{};
  if (head == "aifs-sifs" && !has_arg) return policy::AifsSifs{};
  if (head == "fixed-cw") {
    const double cw = has_arg ? detail::parse_number(arg, "fixed-cw") : 16.0;
    if (cw < 1 || cw != static_cast<int>(cw)) throw DomainError("fixed-cw needs a positive integer window");
    return policy::FixedCW{static_cast<int>(cw)};
  }
  if (head == "large-txop") {
    const double us = has_arg ? detail::parse_number(arg, "large-txop") : 6413.0;
    if (us <= 0) throw DomainError("large-txop needs a positive duration");
    return policy::LargeTxop{us};
  }
  if (head == "scripted" && has_arg) {
    policy::Scripted s;
    std::size_t start = 0;
    while (start <= arg.size()) {
      const auto comma = arg.find(',', start);
      const auto piece = arg.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      s.y.push_back(detail::parse_number(piece, "scripted"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return s;
  }
  throw DomainError("unknown policy '" + std::string(text) + "'");
}

}  // namespace dcfguard
