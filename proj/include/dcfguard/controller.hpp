#pragma once

// AP-side policing: per-station penalty accumulation and ACK suppression.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dcfguard/error.hpp"

namespace dcfguard {

/// Opaque station identifier (plays the role of the MAC address).
using StationId = std::uint32_t;

struct ControllerConfig {
  double alpha = 0.1;
  double update_period_s = 10.0;
  int disassociation_threshold = 6;  // consecutive windows at p_nack = 1

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ControllerConfig: alpha must be in (0, 1)");
    if (!(update_period_s > 0.0)) throw DomainError("ControllerConfig: update_period_s must be positive");
    if (disassociation_threshold < 1) throw DomainError("ControllerConfig: disassociation_threshold must be >= 1");
  }
};

/// Penalty carried by one station. `penalty` is unbounded above so that
/// past aggression keeps being repaid after suppression saturates.
struct PenaltyState {
  StationId station_id = 0;
  double penalty = 0.0;
  double p_nack = 0.0;
  int windows_at_full_suppression = 0;

  friend bool operator==(const PenaltyState&, const PenaltyState&) = default;
};

struct RateMeasurement {
  StationId station_id = 0;
  double measured_rate = 0.0;
  double fair_rate = 0.0;
  std::uint64_t window_slots = 0;
};

/// p' = max(0, p + α (measured/fair - 1)); P_NACK' = min(p', 1).
/// Throws EstimationError when the fair rate is unusable.
inline PenaltyState update_penalty(const PenaltyState& state, const RateMeasurement& meas,
                                   const ControllerConfig& cfg) {
  if (!(meas.fair_rate > 0.0) || !std::isfinite(meas.fair_rate))
    throw EstimationError("fair rate unavailable for station " + std::to_string(state.station_id));
  PenaltyState next = state;
  next.penalty = std::max(0.0, state.penalty + cfg.alpha * (meas.measured_rate / meas.fair_rate - 1.0));
  next.p_nack = std::min(next.penalty, 1.0);
  next.windows_at_full_suppression = next.p_nack >= 1.0 ? state.windows_at_full_suppression + 1 : 0;
  return next;
}

/// ACK the frame unless u falls below the suppression probability.
inline bool should_ack(const PenaltyState& state, double u) { return u >= state.p_nack; }

enum class Escalation { Continue, DropDataToo, Disassociate };

inline std::string_view to_string(Escalation e) {
  switch (e) {
    case Escalation::Continue: return "continue";
    case Escalation::DropDataToo: return "drop-data";
    case Escalation::Disassociate: return "disassociate";
  }
  return "?";
}

inline Escalation escalation_check(const PenaltyState& state, const ControllerConfig& cfg) {
  if (state.p_nack < 1.0) return Escalation::Continue;
  if (state.windows_at_full_suppression >= cfg.disassociation_threshold) return Escalation::Disassociate;
  return Escalation::DropDataToo;
}

/// Penalties of stations that left, restored when they come back.
class PenaltyArchive {
 public:
  void on_disassociate(const PenaltyState& state) { archived_[state.station_id] = state; }

  /// Archived state for a returning station, or a fresh zero penalty.
  PenaltyState on_reassociate(StationId id) {
    auto it = archived_.find(id);
    if (it == archived_.end()) return PenaltyState{id};
    PenaltyState restored = it->second;
    archived_.erase(it);
    return restored;
  }

  const PenaltyState* find(StationId id) const {
    auto it = archived_.find(id);
    return it == archived_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return archived_.size(); }

 private:
  std::map<StationId, PenaltyState> archived_;
};

struct ControllerRecord {
  StationId station_id = 0;
  double measured_rate = 0.0;
  double fair_rate = 0.0;
  PenaltyState state;
  Escalation escalation = Escalation::Continue;
  bool skipped = false;  // estimation failure, state left unchanged
};

/// Station table of associated clients plus the archive of departed ones.
/// Updates happen only at window boundaries from a single context.
class PolicingController {
 public:
  explicit PolicingController(ControllerConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  const ControllerConfig& config() const { return cfg_; }

  /// Optional sink for skipped updates.
  void set_logger(std::function<void(std::string_view)> log) { log_ = std::move(log); }

  const PenaltyState& associate(StationId id) {
    auto it = table_.find(id);
    if (it != table_.end()) return it->second;
    return table_.emplace(id, archive_.on_reassociate(id)).first->second;
  }

  void disassociate(StationId id) {
    auto it = table_.find(id);
    if (it == table_.end()) return;
    archive_.on_disassociate(it->second);
    table_.erase(it);
  }

  bool associated(StationId id) const { return table_.contains(id); }

  const PenaltyState* find(StationId id) const {
    auto it = table_.find(id);
    return it == table_.end() ? nullptr : &it->second;
  }

  const PenaltyArchive& archive() const { return archive_; }

  /// Overwrites the penalty of an associated station (used to start from a given p(0)).
  void set_penalty(StationId id, double penalty) {
    auto& s = table_.at(id);
    s.penalty = std::max(0.0, penalty);
    s.p_nack = std::min(s.penalty, 1.0);
    s.windows_at_full_suppression = 0;
  }

  ControllerRecord update(const RateMeasurement& meas) {
    auto& state = table_.at(meas.station_id);
    ControllerRecord rec{meas.station_id, meas.measured_rate, meas.fair_rate, state};
    try {
      state = update_penalty(state, meas, cfg_);
    } catch (const EstimationError& e) {
      rec.skipped = true;
      if (log_) log_(e.what());
    }
    rec.state = state;
    rec.escalation = escalation_check(state, cfg_);
    return rec;
  }

 private:
  ControllerConfig cfg_;
  std::map<StationId, PenaltyState> table_;
  PenaltyArchive archive_;
  std::function<void(std::string_view)> log_;
};

}  // namespace dcfguard
