#pragma once

// Closed-form 802.11 DCF models: the attempt-probability map g(f), fixed
// points of the decoupled (Bianchi-style) contention model, throughput, and
// the virtual-MAC relations used to estimate the fair attempt rate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcfguard/error.hpp"
#include "dcfguard/phy.hpp"

namespace dcfguard {

/// Contention parameters of one station class.
struct MacParams {
  int cw_min = 32;             // W
  int max_backoff_stage = 5;   // m, CW_max = W * 2^m
  int retry_limit = 7;         // R
  int aifs_slots = 2;          // idle slots deferred after a busy period (2 = DIFS)
  double txop_limit_us = 0.0;  // 0 = one frame per access

  int cw_max() const { return cw_min << max_backoff_stage; }

  void validate() const {
    if (cw_min < 1) throw DomainError("MacParams: cw_min must be >= 1");
    if (max_backoff_stage < 0 || max_backoff_stage > 20)
      throw DomainError("MacParams: max_backoff_stage out of range");
    if (retry_limit < max_backoff_stage)
      throw DomainError("MacParams: retry_limit must be >= max_backoff_stage");
    if (aifs_slots < 0) throw DomainError("MacParams: aifs_slots must be >= 0");
    if (txop_limit_us < 0) throw DomainError("MacParams: txop_limit must be >= 0");
  }

  friend bool operator==(const MacParams&, const MacParams&) = default;
};

/// Standard compliant configuration: CW_min=32, CW_max=1024, AIFS=DIFS, no TXOP.
inline constexpr MacParams kCompliantParams{};

struct SlotProbabilities {
  double p_empty = 1.0;
  double p_success = 0.0;
  double p_collision = 0.0;
};

struct EstimatorConfig {
  double z_score = 1.96;
  double epsilon = 0.01;

  void validate() const {
    if (!(z_score > 0)) throw DomainError("EstimatorConfig: z_score must be positive");
    if (!(epsilon > 0 && epsilon < 0.5)) throw DomainError("EstimatorConfig: epsilon must be in (0, 0.5)");
  }

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

namespace detail {

inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

// sum_{k=0}^{n} r^k, zero for n < 0
inline double power_sum(double r, int n) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k <= n; ++k) {
    sum += term;
    term *= r;
  }
  return sum;
}

}  // namespace detail

/// Attempt probability g(f) of a saturated station with retry-limited binary
/// exponential backoff that sees per-attempt failure probability f.
///
/// Evaluated with the (1-2f) and (1-f) factors divided out of numerator and
/// denominator, which removes the 0/0 points at f = 1/2 and f = 1 and keeps
/// the map continuous on the closed interval [0, 1].
inline double attempt_probability(double f, const MacParams& params) {
  detail::require_probability(f, "failure probability");
  const double w = params.cw_min;
  const int m = params.max_backoff_stage;
  const int r = params.retry_limit;
  const double retries = detail::power_sum(f, r);
  const double doubling = detail::power_sum(2.0 * f, m);
  const double capped = w * std::ldexp(1.0, m) * std::pow(f, m + 1) * detail::power_sum(f, r - m - 1);
  return 2.0 * retries / (w * doubling + retries + capped);
}

/// A frame attempt fails if it collides or its ACK is suppressed.
inline double effective_failure(double f_collision, double p_nack) {
  detail::require_probability(f_collision, "collision probability");
  detail::require_probability(p_nack, "ACK suppression probability");
  // f + p - f p, exact when either input is 0
  return f_collision + p_nack - f_collision * p_nack;
}

/// x / x̄ for a compliant station whose ACKs are suppressed with probability p_nack.
inline double normalized_attempt(double f, double p_nack, const MacParams& params = kCompliantParams) {
  return attempt_probability(effective_failure(f, p_nack), params) / attempt_probability(f, params);
}

struct FixedPoint {
  double x = 0.0;  // attempt probability
  double f = 0.0;  // collision probability
  int iterations = 0;
  double residual = 0.0;
};

/// Solves x = g(f), f = 1 - (1-x)^{n-1} by bisection on f.
inline FixedPoint homogeneous_fixed_point(int n, const MacParams& params = kCompliantParams) {
  if (n < 1) throw DomainError("station count must be >= 1");
  params.validate();
  if (n == 1) return {attempt_probability(0.0, params), 0.0, 0, 0.0};

  auto collision_given = [&](double f) {
    return 1.0 - std::pow(1.0 - attempt_probability(f, params), n - 1);
  };
  // f - collision_given(f) is increasing: g decreases in f.
  double lo = 0.0;
  double hi = 1.0 - 1e-12;
  int it = 0;
  for (; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid - collision_given(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  FixedPoint fp;
  fp.f = 0.5 * (lo + hi);
  fp.x = attempt_probability(fp.f, params);
  fp.iterations = it;
  fp.residual = std::abs(fp.f - (1.0 - std::pow(1.0 - fp.x, n - 1)));
  if (fp.residual > 1e-10) throw ConvergenceError("homogeneous fixed point", it, fp.residual);
  return fp;
}

/// One homogeneous group in a multi-class network.
struct StationClass {
  int count = 1;
  MacParams params = kCompliantParams;
  double p_nack = 0.0;
};

struct ClassFixedPoint {
  double x = 0.0;            // attempt probability of each member
  double f = 0.0;            // collision probability seen by each member
  double f_effective = 0.0;  // including ACK suppression
};

struct HeterogeneousSolution {
  std::vector<ClassFixedPoint> classes;
  int iterations = 0;
  double residual = 0.0;
};

/// Per-class fixed point of x_i = g_i(effective_failure(f_i, p_nack_i)),
/// f_i = 1 - prod_{j != i}(1 - x_j), by damped successive substitution.
inline HeterogeneousSolution heterogeneous_fixed_point(std::span<const StationClass> classes,
                                                       double damping = 0.5) {
  if (classes.empty()) throw DomainError("at least one station class required");
  for (const auto& c : classes) {
    if (c.count < 1) throw DomainError("class count must be >= 1");
    c.params.validate();
    detail::require_probability(c.p_nack, "class p_nack");
  }
  const std::size_t k = classes.size();
  std::vector<double> x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = attempt_probability(0.0, classes[i].params);

  auto collision = [&](const std::vector<double>& xs, std::size_t i) {
    double idle = std::pow(1.0 - xs[i], classes[i].count - 1);
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) idle *= std::pow(1.0 - xs[j], classes[j].count);
    return 1.0 - idle;
  };

  HeterogeneousSolution sol;
  std::vector<double> next(k);
  constexpr int kMaxIterations = 100000;
  double step = 1.0;
  int it = 0;
  for (; it < kMaxIterations && step > 1e-14; ++it) {
    step = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double fe = effective_failure(collision(x, i), classes[i].p_nack);
      next[i] = attempt_probability(fe, classes[i].params);
    }
    for (std::size_t i = 0; i < k; ++i) {
      step = std::max(step, std::abs(next[i] - x[i]));
      x[i] = (1.0 - damping) * x[i] + damping * next[i];
    }
  }
  sol.iterations = it;
  sol.classes.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto& c = sol.classes[i];
    c.x = x[i];
    c.f = collision(x, i);
    c.f_effective = effective_failure(c.f, classes[i].p_nack);
    sol.residual = std::max(sol.residual, std::abs(c.x - attempt_probability(c.f_effective, classes[i].params)));
  }
  if (sol.residual > 1e-9) throw ConvergenceError("heterogeneous fixed point", it, sol.residual);
  return sol;
}

struct ThroughputResult {
  std::vector<double> success_probability;  // per station, per slot
  std::vector<double> throughput_bps;
  SlotProbabilities slots;
  double mean_slot_us = 0.0;
};

/// E[T_slot] = P_e σ + P_s T_s + P_c T_c.
inline double expected_slot_duration(const SlotProbabilities& p, const PhyTiming& timing) {
  return p.p_empty * timing.slot_us + p.p_success * timing.t_success_us + p.p_collision * timing.t_collision_us;
}

inline ThroughputResult throughput(std::span<const double> x, const PhyTiming& timing) {
  ThroughputResult r;
  double idle = 1.0;
  for (double xi : x) {
    if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("attempt probabilities must lie in [0, 1)");
    idle *= 1.0 - xi;
  }
  r.success_probability.resize(x.size());
  double ps = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.success_probability[i] = x[i] * idle / (1.0 - x[i]);
    ps += r.success_probability[i];
  }
  r.slots = {idle, ps, std::max(0.0, 1.0 - idle - ps)};
  r.mean_slot_us = expected_slot_duration(r.slots, timing);
  r.throughput_bps.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r.throughput_bps[i] = r.success_probability[i] * timing.payload_bits() / r.mean_slot_us * 1e6;
  return r;
}

/// Failure probability seen by a saturated virtual MAC alongside a fair
/// station with collision probability f1: 1 - (1 - g(f1))(1 - f1).
inline double virtual_failure(double f1, const MacParams& params = kCompliantParams) {
  return 1.0 - (1.0 - attempt_probability(f1, params)) * (1.0 - f1);
}

/// Inverse of virtual_failure on [g(0), 1).
inline double invert_virtual_failure(double f_v, const MacParams& params = kCompliantParams) {
  const double floor = attempt_probability(0.0, params);
  if (!(f_v < 1.0)) throw DomainError("virtual failure probability must be < 1");
  if (f_v < floor - 1e-15)
    throw DomainError("virtual failure probability below g(0): fewer than zero contenders");
  if (f_v <= floor) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (virtual_failure(mid, params) < f_v)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Maximum attempt rate x̄ of a fair saturated station given the virtual failure probability.
inline double fair_attempt_rate(double f_v, const MacParams& params = kCompliantParams) {
  return attempt_probability(invert_virtual_failure(f_v, params), params);
}

/// N = ceil((z / 2ε)^2) Bernoulli observations for a ±ε estimate.
inline std::int64_t required_samples(const EstimatorConfig& cfg) {
  cfg.validate();
  const double q = cfg.z_score / (2.0 * cfg.epsilon);
  // shave rounding noise so that exact squares (e.g. 98^2) are not pushed up by one
  return static_cast<std::int64_t>(std::ceil(q * q * (1.0 - 1e-12)));
}

/// Observation window T_update = N * E[T_slot] (seconds) for n saturated compliant stations.
inline double observation_time_s(int n, const PhyTiming& timing, const EstimatorConfig& cfg = {},
                                 const MacParams& params = kCompliantParams) {
  const FixedPoint fp = homogeneous_fixed_point(n, params);
  const std::vector<double> x(static_cast<std::size_t>(n), fp.x);
  const ThroughputResult t = throughput(x, timing);
  return static_cast<double>(required_samples(cfg)) * t.mean_slot_us * 1e-6;
}

}  // namespace dcfguard
