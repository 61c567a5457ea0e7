#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "dcfguard/error.hpp"

namespace dcfguard {

/// Channel timing for one PHY configuration. All durations in microseconds.
///
/// `t_collision_us` covers the data frame plus DIFS (the ACK timeout
/// convention); `t_success_us` adds SIFS and the ACK on top of that.
struct PhyTiming {
  std::string preset;
  double slot_us = 20.0;
  double sifs_us = 10.0;
  double difs_us = 50.0;
  double phy_rate_bps = 11e6;
  double basic_rate_bps = 1e6;
  int payload_bytes = 1000;
  double header_overhead_us = 0.0;
  double ack_duration_us = 0.0;
  double t_success_us = 0.0;
  double t_collision_us = 0.0;

  double payload_bits() const { return 8.0 * payload_bytes; }
  double payload_airtime_us() const { return payload_bits() / phy_rate_bps * 1e6; }
  double data_airtime_us() const { return header_overhead_us + payload_airtime_us(); }

  /// Number of DIFS idle slots beyond SIFS (2 for every standard PHY).
  int difs_slots() const { return static_cast<int>(std::lround((difs_us - sifs_us) / slot_us)); }

  /// Frames that fit in one TXOP: k data frames, k SIFS+ACK exchanges and
  /// k-1 separating SIFS must not exceed the limit. Zero limit means one frame.
  int frames_per_txop(double txop_limit_us) const {
    if (txop_limit_us <= 0.0) return 1;
    const double per_frame = data_airtime_us() + 2.0 * sifs_us + ack_duration_us;
    const int k = static_cast<int>(std::floor((txop_limit_us + sifs_us) / per_frame + 1e-9));
    return k < 1 ? 1 : k;
  }

  void validate() const {
    if (!(slot_us > 0 && sifs_us > 0 && phy_rate_bps > 0 && payload_bytes > 0))
      throw DomainError("PhyTiming: durations, rate and payload must be positive");
    if (std::abs(difs_us - (sifs_us + 2.0 * slot_us)) > 1e-9)
      throw DomainError("PhyTiming: DIFS must equal SIFS + 2 slots");
    if (!(t_collision_us > 0 && t_success_us >= t_collision_us))
      throw DomainError("PhyTiming: require t_success >= t_collision > 0");
  }
};

namespace detail {

inline PhyTiming finish_timing(PhyTiming t) {
  t.t_collision_us = t.data_airtime_us() + t.difs_us;
  t.t_success_us = t.t_collision_us + t.sifs_us + t.ack_duration_us;
  return t;
}

inline constexpr int kMacOverheadBytes = 28;  // 24-byte header + FCS
inline constexpr int kAckBytes = 14;

}  // namespace detail

/// 802.11b HR/DSSS at 11 Mb/s, long preamble, ACK at 1 Mb/s.
inline PhyTiming dot11b(int payload_bytes = 1000) {
  PhyTiming t;
  t.preset = "dot11b-11M";
  t.slot_us = 20.0;
  t.sifs_us = 10.0;
  t.difs_us = 50.0;
  t.phy_rate_bps = 11e6;
  t.basic_rate_bps = 1e6;
  t.payload_bytes = payload_bytes;
  constexpr double preamble_us = 192.0;
  t.header_overhead_us = preamble_us + 8.0 * detail::kMacOverheadBytes / t.phy_rate_bps * 1e6;
  t.ack_duration_us = preamble_us + 8.0 * detail::kAckBytes / t.basic_rate_bps * 1e6;
  return detail::finish_timing(t);
}

/// 802.11g ERP-OFDM at 54 Mb/s, short slot, ACK at 24 Mb/s.
inline PhyTiming dot11g(int payload_bytes = 1500) {
  PhyTiming t;
  t.preset = "dot11g-54M";
  t.slot_us = 9.0;
  t.sifs_us = 10.0;
  t.difs_us = 28.0;
  t.phy_rate_bps = 54e6;
  t.basic_rate_bps = 24e6;
  t.payload_bytes = payload_bytes;
  constexpr double preamble_us = 20.0;
  constexpr double symbol_us = 4.0;
  constexpr int service_tail_bits = 22;
  auto ofdm_airtime = [&](int bytes, double rate) {
    const double bits_per_symbol = rate * symbol_us * 1e-6;
    return preamble_us + symbol_us * std::ceil((service_tail_bits + 8.0 * bytes) / bits_per_symbol);
  };
  const double data = ofdm_airtime(detail::kMacOverheadBytes + payload_bytes, t.phy_rate_bps);
  t.header_overhead_us = data - t.payload_airtime_us();
  t.ack_duration_us = ofdm_airtime(detail::kAckBytes, t.basic_rate_bps);
  return detail::finish_timing(t);
}

inline PhyTiming phy_preset(std::string_view name, int payload_bytes) {
  if (name == "dot11b-11M") return dot11b(payload_bytes);
  if (name == "dot11g-54M") return dot11g(payload_bytes);
  throw DomainError("unknown PHY preset '" + std::string(name) + "'");
}

}  // namespace dcfguard
