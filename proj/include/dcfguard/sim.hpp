#pragma once

// Slot-granular DCF simulator with an AP that polices stations by
// suppressing ACKs and estimates the fair attempt rate with a virtual MAC.
//
// Slot model. Busy periods last T_s - 2σ (success) or T_c - 2σ (collision):
// the remaining 2σ of DIFS is played out as idle slots during which
// stations with aifs_slots = 2 are still deferring. A slot is a contention
// slot when a compliant station may count down in it (the virtual MAC's
// deferral has expired); rates are measured per contention slot, which is
// the slot unit of the analytic model. Stations whose deferral has expired
// decrement their counter in every slot they do not transmit in, busy or
// idle, as the analytic model assumes.
//
// RNG draw order within a slot: traffic arrivals (stations in id order),
// then the AP (capture, then one ACK draw per frame), then station backoff
// redraws in id order, then the virtual MAC.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcfguard/analytics.hpp"
#include "dcfguard/config.hpp"
#include "dcfguard/controller.hpp"
#include "dcfguard/error.hpp"
#include "dcfguard/phy.hpp"
#include "dcfguard/policy.hpp"
#include "dcfguard/random.hpp"
#include "dcfguard/robustness.hpp"

namespace dcfguard {

struct StationCounters {
  std::uint64_t attempts = 0;       // frames put on the air
  std::uint64_t fcs_successes = 0;  // frames the AP decoded
  std::uint64_t acked = 0;          // frames the AP acknowledged and delivered
  std::uint64_t accesses = 0;       // channel accesses (a TXOP burst is one)
  std::uint64_t dropped = 0;        // frames discarded at the retry limit
};

struct StationState {
  StationId id = 0;
  MacParams params;
  BehaviourPolicy policy;
  TrafficSource traffic;
  int capture_priority = 0;
  std::optional<double> forced_p_nack;
  std::optional<double> initial_penalty;
  std::vector<Session> sessions;

  int backoff_counter = 0;
  int backoff_stage = 0;
  int retry_count = 0;
  int defer_remaining = 0;
  int burst_frames = 1;

  bool active = false;
  bool ever_associated = false;
  std::size_t next_session = 0;  // index of the next session to start
  bool banned_until_leave = false;

  // traffic source state
  bool queue_nonempty = true;
  std::uint64_t queue_len = 0;
  bool on_phase = true;
  double phase_end_us = 0.0;
  double next_arrival_us = 0.0;

  StationCounters window;
  StationCounters total;
};

struct VirtualMacState {
  int backoff_counter = 0;
  int backoff_stage = 0;
  int retry_count = 0;
  int defer_remaining = 0;
  std::uint64_t virtual_attempts = 0;
  std::uint64_t virtual_failures = 0;
};

struct SimClock {
  std::uint64_t slot_index = 0;
  double sim_time_us = 0.0;
  std::uint64_t window_index = 0;
};

struct SlotOutcome {
  enum class Kind { Idle, Success, Collision };
  Kind kind = Kind::Idle;
  std::vector<StationId> stations;  // winner first on Success; all colliders on Collision
  int frames_in_burst = 0;          // frames put on air by the winner
  int frames_acked = 0;
  bool acked = false;               // every frame of the burst acknowledged
  bool captured = false;            // Success resolved from simultaneous transmissions
  bool contention = false;
  double duration_us = 0.0;
};

struct SlotCounts {
  std::uint64_t idle = 0;
  std::uint64_t success = 0;
  std::uint64_t collision = 0;
  std::uint64_t contention = 0;

  std::uint64_t total() const { return idle + success + collision; }
};

/// One per associated station per window.
struct WindowRecord {
  double time_s = 0.0;  // window end
  std::uint64_t window = 0;
  StationId station_id = 0;
  std::uint64_t attempts = 0;
  std::uint64_t fcs_successes = 0;
  std::uint64_t acked = 0;
  std::uint64_t contention_slots = 0;
  double measured_rate = 0.0;
  double fair_rate = 0.0;  // NaN when the estimate failed
  double penalty = 0.0;
  double p_nack = 0.0;
  Escalation escalation = Escalation::Continue;
  bool skipped = false;
};

/// Network-wide view of one window.
struct NetworkWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  SlotCounts slots;
  std::uint64_t virtual_attempts = 0;
  std::uint64_t virtual_failures = 0;
  double f_v = 0.0;
  double f1 = 0.0;                 // NaN when the estimate failed
  double fair_attempt_rate = 0.0;  // g(f1), NaN when the estimate failed
  bool estimate_ok = false;
};

struct SimEvent {
  double time_s = 0.0;
  StationId station_id = 0;
  std::string what;  // join, leave, disassociate, estimation-failure
};

struct StationSummary {
  StationId station_id = 0;
  std::uint64_t windows = 0;
  double mean_attempt_rate = 0.0;  // attempts per contention slot
  double goodput_bps = 0.0;        // acknowledged payload per associated second
  double utility = 0.0;            // ln(goodput_bps), -inf when nothing delivered
};

struct SimTrace {
  std::vector<WindowRecord> rows;
  std::vector<NetworkWindow> windows;
  std::vector<SimEvent> events;
  std::vector<StationSummary> summary;
  SlotCounts slots;
  double sim_time_s = 0.0;
};

/// Per-station summary recomputed from window rows alone.
inline std::vector<StationSummary> summarise(const std::vector<WindowRecord>& rows, double window_s,
                                             const PhyTiming& timing) {
  std::map<StationId, std::array<std::uint64_t, 4>> acc;  // windows, attempts, slots, acked
  for (const auto& r : rows) {
    auto& a = acc[r.station_id];
    a[0] += 1;
    a[1] += r.attempts;
    a[2] += r.contention_slots;
    a[3] += r.acked;
  }
  std::vector<StationSummary> out;
  for (const auto& [id, a] : acc) {
    StationSummary s;
    s.station_id = id;
    s.windows = a[0];
    s.mean_attempt_rate = a[2] ? static_cast<double>(a[1]) / static_cast<double>(a[2]) : 0.0;
    s.goodput_bps = static_cast<double>(a[3]) * timing.payload_bits() / (static_cast<double>(a[0]) * window_s);
    s.utility = std::log(s.goodput_bps);
    out.push_back(s);
  }
  return out;
}

class Simulator {
 public:
  explicit Simulator(ScenarioConfig cfg)
      : cfg_(std::move(cfg)), timing_(validated_phy(cfg_)), rng_(cfg_.seed), controller_(cfg_.controller) {
    busy_trim_us_ = timing_.difs_slots() * timing_.slot_us;
    window_us_ = cfg_.controller.update_period_s * 1e6;
    std::vector<StationConfig> sorted = cfg_.stations;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& sc : sorted) {
      StationState s;
      s.id = sc.id;
      s.policy = sc.policy;
      s.params = apply_policy(sc.policy);
      s.traffic = sc.traffic;
      s.capture_priority = sc.capture_priority;
      s.forced_p_nack = sc.forced_p_nack;
      s.initial_penalty = sc.initial_penalty;
      s.sessions = sc.sessions;
      s.burst_frames = timing_.frames_per_txop(s.params.txop_limit_us);
      stations_.push_back(std::move(s));
    }
    virtual_.defer_remaining = kCompliantParams.aifs_slots;
    virtual_.backoff_counter = static_cast<int>(rng_.below(static_cast<std::uint32_t>(kCompliantParams.cw_min)));
    apply_schedule();
    scripted_estimate_ = initial_fair_estimate();
    apply_scripts();
  }

  const ScenarioConfig& config() const { return cfg_; }
  const PhyTiming& timing() const { return timing_; }
  const SimClock& clock() const { return clock_; }
  const std::vector<StationState>& stations() const { return stations_; }
  const VirtualMacState& virtual_mac() const { return virtual_; }
  const PolicingController& controller() const { return controller_; }
  const SimTrace& trace() const { return trace_; }

  const StationState& station(StationId id) const {
    for (const auto& s : stations_)
      if (s.id == id) return s;
    throw DomainError("unknown station " + std::to_string(id));
  }

  /// Advances one slot; closes the window when the slot crosses its end.
  SlotOutcome step_slot() {
    apply_schedule();
    draw_arrivals();

    const bool contention = virtual_.defer_remaining == 0;
    std::vector<std::size_t> tx;
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      const auto& s = stations_[i];
      if (s.active && s.queue_nonempty && s.defer_remaining == 0 && s.backoff_counter == 0) tx.push_back(i);
    }

    SlotOutcome out;
    out.contention = contention;
    std::optional<std::size_t> winner;
    if (tx.size() == 1) {
      winner = tx.front();
    } else if (tx.size() >= 2) {
      winner = capture_resolve(tx);
      out.captured = winner.has_value();
    }

    std::vector<bool> redraw(stations_.size(), false);
    if (tx.empty()) {
      out.kind = SlotOutcome::Kind::Idle;
      out.duration_us = timing_.slot_us;
    } else if (winner) {
      out.kind = SlotOutcome::Kind::Success;
      auto& w = stations_[*winner];
      out.stations.push_back(w.id);
      for (std::size_t i : tx)
        if (i != *winner) out.stations.push_back(stations_[i].id);
      run_burst(w, out);
      out.duration_us = out.frames_in_burst * (timing_.t_success_us - busy_trim_us_);
      for (std::size_t i : tx) {
        redraw[i] = true;
        if (i == *winner) continue;
        auto& loser = stations_[i];
        loser.window.attempts += 1;
        loser.total.attempts += 1;
        ++loser.window.accesses;
        ++loser.total.accesses;
        on_failure(loser);
      }
    } else {
      out.kind = SlotOutcome::Kind::Collision;
      out.duration_us = timing_.t_collision_us - busy_trim_us_;
      for (std::size_t i : tx) {
        auto& s = stations_[i];
        out.stations.push_back(s.id);
        s.window.attempts += 1;
        s.total.attempts += 1;
        ++s.window.accesses;
        ++s.total.accesses;
        on_failure(s);
        redraw[i] = true;
      }
    }

    // countdown, deferral and backoff redraws, stations in id order
    const bool busy = !tx.empty();
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      auto& s = stations_[i];
      if (!s.active) continue;
      if (redraw[i]) {
        draw_backoff(s);
      } else if (s.defer_remaining == 0) {
        if (s.backoff_counter > 0) --s.backoff_counter;
      } else if (!busy) {
        --s.defer_remaining;
      }
      if (busy) s.defer_remaining = s.params.aifs_slots;
    }
    step_virtual(busy);

    switch (out.kind) {
      case SlotOutcome::Kind::Idle: ++window_slots_.idle; break;
      case SlotOutcome::Kind::Success: ++window_slots_.success; break;
      case SlotOutcome::Kind::Collision: ++window_slots_.collision; break;
    }
    if (contention) ++window_slots_.contention;

    ++clock_.slot_index;
    clock_.sim_time_us += out.duration_us;
    if (clock_.sim_time_us >= window_end_us()) close_window();
    return out;
  }

  /// Exactly one transmitter with strictly maximal positive priority wins
  /// with probability p_capture; otherwise the transmissions collide.
  std::optional<std::size_t> capture_resolve(const std::vector<std::size_t>& tx) {
    int best = 0;
    std::optional<std::size_t> top;
    bool tie = false;
    for (std::size_t i : tx) {
      const int p = stations_[i].capture_priority;
      if (p > best) {
        best = p;
        top = i;
        tie = false;
      } else if (p == best && p > 0) {
        tie = true;
      }
    }
    if (!top || tie) return std::nullopt;
    if (cfg_.p_capture >= 1.0) return top;
    if (cfg_.p_capture <= 0.0) return std::nullopt;
    return rng_.uniform() < cfg_.p_capture ? top : std::nullopt;
  }

  /// Estimates the fair rate, feeds one measurement per associated station
  /// to the controller and resets the window counters.
  void close_window() {
    NetworkWindow nw;
    nw.start_s = static_cast<double>(clock_.window_index) * cfg_.controller.update_period_s;
    nw.end_s = clock_.sim_time_us * 1e-6;
    nw.slots = window_slots_;
    nw.virtual_attempts = virtual_.virtual_attempts;
    nw.virtual_failures = virtual_.virtual_failures;
    nw.f_v = nw.virtual_attempts ? static_cast<double>(nw.virtual_failures) / static_cast<double>(nw.virtual_attempts)
                                 : 0.0;
    nw.f1 = std::nan("");
    nw.fair_attempt_rate = std::nan("");

    const bool anyone = std::any_of(stations_.begin(), stations_.end(), [](const auto& s) { return s.active; });
    if (anyone && nw.virtual_attempts > 0 && nw.f_v < 1.0) {
      // sampling noise can put f̂_v below the lone-station floor g(0)
      const double floor = attempt_probability(0.0, kCompliantParams);
      nw.f1 = nw.f_v <= floor ? 0.0 : invert_virtual_failure(nw.f_v);
      nw.fair_attempt_rate = attempt_probability(nw.f1, kCompliantParams);
      nw.estimate_ok = true;
    } else {
      trace_.events.push_back({nw.end_s, 0, "estimation-failure"});
    }

    const double fair = !nw.estimate_ok ? std::nan("")
                        : cfg_.measurement_mode == MeasurementMode::Oracle
                            ? nw.fair_attempt_rate
                            : nw.fair_attempt_rate * (1.0 - nw.f1);
    const auto slots = static_cast<double>(window_slots_.contention);

    std::vector<StationId> to_disassociate;
    for (auto& s : stations_) {
      if (!s.active) continue;
      WindowRecord r;
      r.time_s = nw.end_s;
      r.window = clock_.window_index;
      r.station_id = s.id;
      r.attempts = s.window.attempts;
      r.fcs_successes = s.window.fcs_successes;
      r.acked = s.window.acked;
      r.contention_slots = window_slots_.contention;
      const double count = cfg_.measurement_mode == MeasurementMode::Oracle
                               ? static_cast<double>(s.window.attempts)
                               : static_cast<double>(s.window.fcs_successes);
      r.measured_rate = slots > 0 ? count / slots : 0.0;
      r.fair_rate = fair;
      if (cfg_.policing) {
        const ControllerRecord cr =
            controller_.update(RateMeasurement{s.id, r.measured_rate, fair, window_slots_.contention});
        r.skipped = cr.skipped;
        r.escalation = cr.escalation;
        if (cr.escalation == Escalation::Disassociate) to_disassociate.push_back(s.id);
      }
      if (const auto* st = controller_.find(s.id)) {
        r.penalty = st->penalty;
        r.p_nack = st->p_nack;
      }
      if (s.forced_p_nack) r.p_nack = *s.forced_p_nack;
      trace_.rows.push_back(r);
      s.window = {};
    }
    for (StationId id : to_disassociate) {
      auto& s = mutable_station(id);
      deactivate(s, "disassociate");
      s.banned_until_leave = true;
    }

    trace_.windows.push_back(nw);
    if (nw.estimate_ok) scripted_estimate_ = {nw.fair_attempt_rate, nw.f1};
    window_slots_ = {};
    virtual_.virtual_attempts = 0;
    virtual_.virtual_failures = 0;
    ++clock_.window_index;
    apply_scripts();
  }

  /// Runs until the configured duration; windows close every update period.
  SimTrace run() {
    const double end_us = cfg_.duration_s * 1e6;
    while (clock_.sim_time_us < end_us) step_slot();
    trace_.sim_time_s = clock_.sim_time_us * 1e-6;
    trace_.slots = slot_totals();
    trace_.summary = summarise(trace_.rows, cfg_.controller.update_period_s, timing_);
    return trace_;
  }

  /// Slot totals since the start, including the open window.
  SlotCounts slot_totals() const {
    SlotCounts t = window_slots_;
    for (const auto& w : trace_.windows) {
      t.idle += w.slots.idle;
      t.success += w.slots.success;
      t.collision += w.slots.collision;
      t.contention += w.slots.contention;
    }
    return t;
  }

  std::uint64_t open_window_contention_slots() const { return window_slots_.contention; }

 private:
  struct FairEstimate {
    double x = 0.0;
    double f1 = 0.0;
  };

  static PhyTiming validated_phy(const ScenarioConfig& cfg) {
    cfg.validate();
    return cfg.phy();
  }

  double window_end_us() const { return static_cast<double>(clock_.window_index + 1) * window_us_; }

  StationState& mutable_station(StationId id) {
    for (auto& s : stations_)
      if (s.id == id) return s;
    throw DomainError("unknown station " + std::to_string(id));
  }

  FairEstimate initial_fair_estimate() const {
    int n = 0;
    for (const auto& s : stations_) n += s.active ? 1 : 0;
    const FixedPoint fp = homogeneous_fixed_point(std::max(n, 1));
    return {fp.x, fp.f};
  }

  void draw_backoff(StationState& s) {
    const int cw = s.params.cw_min << s.backoff_stage;
    s.backoff_counter = static_cast<int>(rng_.below(static_cast<std::uint32_t>(cw)));
  }

  void on_success(StationState& s) {
    s.backoff_stage = 0;
    s.retry_count = 0;
    dequeue(s);
  }

  void on_failure(StationState& s) {
    s.backoff_stage = std::min(s.backoff_stage + 1, s.params.max_backoff_stage);
    if (++s.retry_count > s.params.retry_limit) {
      ++s.window.dropped;
      ++s.total.dropped;
      s.backoff_stage = 0;
      s.retry_count = 0;
      dequeue(s);
    }
  }

  void dequeue(StationState& s) {
    if (std::holds_alternative<traffic::Saturated>(s.traffic) || std::holds_alternative<traffic::OnOff>(s.traffic))
      return;
    if (s.queue_len > 0) --s.queue_len;
    s.queue_nonempty = s.queue_len > 0;
  }

  double ack_suppression(const StationState& s) const {
    if (s.forced_p_nack) return *s.forced_p_nack;
    if (!cfg_.policing) return 0.0;
    const auto* st = controller_.find(s.id);
    return st ? st->p_nack : 0.0;
  }

  // Frames of one channel access. A frame without ACK ends the burst.
  void run_burst(StationState& s, SlotOutcome& out) {
    const double p_nack = ack_suppression(s);
    const PenaltyState gate{s.id, p_nack, p_nack, 0};
    ++s.window.accesses;
    ++s.total.accesses;
    out.acked = true;
    for (int k = 0; k < s.burst_frames; ++k) {
      ++out.frames_in_burst;
      ++s.window.attempts;
      ++s.total.attempts;
      ++s.window.fcs_successes;
      ++s.total.fcs_successes;
      if (!should_ack(gate, rng_.uniform())) {
        out.acked = false;
        on_failure(s);
        break;
      }
      ++out.frames_acked;
      ++s.window.acked;
      ++s.total.acked;
      on_success(s);
      if (!s.queue_nonempty) break;
    }
  }

  void step_virtual(bool busy) {
    auto& v = virtual_;
    const auto& p = kCompliantParams;
    if (v.defer_remaining == 0) {
      if (v.backoff_counter == 0) {
        ++v.virtual_attempts;
        if (busy) {
          ++v.virtual_failures;
          v.backoff_stage = std::min(v.backoff_stage + 1, p.max_backoff_stage);
          if (++v.retry_count > p.retry_limit) {
            v.backoff_stage = 0;
            v.retry_count = 0;
          }
        } else {
          v.backoff_stage = 0;
          v.retry_count = 0;
        }
        v.backoff_counter = static_cast<int>(rng_.below(static_cast<std::uint32_t>(p.cw_min << v.backoff_stage)));
      } else {
        --v.backoff_counter;
      }
    } else if (!busy) {
      --v.defer_remaining;
    }
    if (busy) v.defer_remaining = p.aifs_slots;
  }

  void draw_arrivals() {
    const double now = clock_.sim_time_us;
    for (auto& s : stations_) {
      if (!s.active) continue;
      std::visit(
          [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, traffic::OnOff>) {
              while (now >= s.phase_end_us) {
                s.on_phase = !s.on_phase;
                s.phase_end_us += s.on_phase ? t.active_s * 1e6 : rng_.exponential(t.idle_mean_s) * 1e6;
              }
              s.queue_nonempty = s.on_phase;
            } else if constexpr (std::is_same_v<T, traffic::Bernoulli>) {
              if (rng_.uniform() < t.arrival_prob_per_slot && s.queue_len < kMaxQueue) ++s.queue_len;
              s.queue_nonempty = s.queue_len > 0;
            } else if constexpr (std::is_same_v<T, traffic::Cbr>) {
              const double interval_us = timing_.payload_bits() / t.bit_rate_bps * 1e6;
              while (s.next_arrival_us <= now) {
                if (s.queue_len < kMaxQueue) ++s.queue_len;
                s.next_arrival_us += interval_us;
              }
              s.queue_nonempty = s.queue_len > 0;
            }
          },
          s.traffic);
    }
  }

  void activate(StationState& s) {
    s.active = true;
    s.backoff_stage = 0;
    s.retry_count = 0;
    s.defer_remaining = s.params.aifs_slots;
    s.queue_len = 0;
    s.queue_nonempty = std::holds_alternative<traffic::Saturated>(s.traffic);
    s.on_phase = true;
    s.phase_end_us = clock_.sim_time_us;
    if (const auto* o = std::get_if<traffic::OnOff>(&s.traffic)) {
      s.phase_end_us = clock_.sim_time_us + o->active_s * 1e6;
      s.queue_nonempty = true;
    }
    s.next_arrival_us = clock_.sim_time_us;
    s.window = {};
    draw_backoff(s);
    controller_.associate(s.id);
    if (!s.ever_associated && s.initial_penalty && cfg_.policing) controller_.set_penalty(s.id, *s.initial_penalty);
    s.ever_associated = true;
    trace_.events.push_back({clock_.sim_time_us * 1e-6, s.id, "join"});
  }

  void deactivate(StationState& s, const char* why) {
    s.active = false;
    s.queue_nonempty = false;
    controller_.disassociate(s.id);
    trace_.events.push_back({clock_.sim_time_us * 1e-6, s.id, why});
  }

  // Joins and leaves whose time has come. A station disassociated by the
  // controller stays away until its current session ends.
  void apply_schedule() {
    const double now_s = clock_.sim_time_us * 1e-6;
    for (auto& s : stations_) {
      if (s.next_session > 0) {
        const Session& cur = s.sessions[s.next_session - 1];
        if (now_s >= cur.leave_s && (s.active || s.banned_until_leave)) {
          if (s.active) deactivate(s, "leave");
          s.banned_until_leave = false;
        }
      }
      if (!s.active && !s.banned_until_leave && s.next_session < s.sessions.size()) {
        const Session& nxt = s.sessions[s.next_session];
        if (now_s >= nxt.join_s) {
          ++s.next_session;
          if (now_s < nxt.leave_s) activate(s);
        }
      }
    }
  }

  // Scripted stations pick the fixed CW for the coming window.
  void apply_scripts() {
    for (auto& s : stations_) {
      const auto* sc = std::get_if<policy::Scripted>(&s.policy);
      if (!sc) continue;
      const std::size_t w = clock_.window_index;
      if (w >= sc->y.size()) {
        s.params = kCompliantParams;
      } else {
        try {
          s.params = scripted_station_rate(sc->y[w], scripted_estimate_.x, kCompliantParams, scripted_estimate_.f1).params;
        } catch (const DomainError&) {
          s.params = kCompliantParams;
          s.params.cw_min = 1;
          s.params.max_backoff_stage = 0;
        }
      }
      s.backoff_stage = std::min(s.backoff_stage, s.params.max_backoff_stage);
      s.burst_frames = timing_.frames_per_txop(s.params.txop_limit_us);
    }
  }

  static constexpr std::uint64_t kMaxQueue = 1000;

  ScenarioConfig cfg_;
  PhyTiming timing_;
  Rng rng_;
  PolicingController controller_;
  std::vector<StationState> stations_;
  VirtualMacState virtual_;
  SimClock clock_;
  SlotCounts window_slots_;
  SimTrace trace_;
  FairEstimate scripted_estimate_;
  double busy_trim_us_ = 0.0;
  double window_us_ = 0.0;
};

/// Convenience wrapper: one full run.
inline SimTrace run(const ScenarioConfig& cfg) { return Simulator(cfg).run(); }

}  // namespace dcfguard
