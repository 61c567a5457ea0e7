#pragma once

// Gaming-resistance harness: goodput of a station that chooses its relative
// deviation y(t) from the fair rate, under the carry-forward penalty
// recursion p(t+1) = max(0, p(t) + α y(t)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dcfguard/analytics.hpp"
#include "dcfguard/error.hpp"

namespace dcfguard {

/// Smallest integer Δ with Δ > 1/α + Y.
inline int min_delta(double alpha, double bound_y) {
  return static_cast<int>(std::floor(1.0 / alpha + bound_y)) + 1;
}

/// A strategy y(1..T) with its bound Y and the horizon split Δ.
struct StrategyTrace {
  std::vector<double> y;
  double bound_y = 1.0;
  double alpha = 0.1;
  int delta = 0;

  int horizon() const { return static_cast<int>(y.size()); }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("StrategyTrace: alpha must be in (0, 1)");
    for (double v : y)
      if (v > bound_y) throw DomainError("StrategyTrace: y(t) exceeds its bound Y");
    if (delta < 1 || !(delta > 1.0 / alpha + bound_y))
      throw DomainError("StrategyTrace: Delta must be an integer > 1/alpha + Y");
  }

  static StrategyTrace with_minimal_delta(std::vector<double> y, double bound_y, double alpha) {
    StrategyTrace t{std::move(y), bound_y, alpha, min_delta(alpha, bound_y)};
    t.validate();
    return t;
  }
};

/// Penalties p(1..T+1): p(1) = 0 and p(t+1) = max(0, p(t) + α y(t)), no
/// upper clamp. Element t-1 is the penalty in force during window t.
inline std::vector<double> penalty_sequence(const StrategyTrace& trace) {
  trace.validate();
  std::vector<double> p(trace.y.size() + 1, 0.0);
  for (std::size_t t = 0; t < trace.y.size(); ++t) p[t + 1] = std::max(0.0, p[t] + trace.alpha * trace.y[t]);
  return p;
}

/// S(T) / x̄ = (1/T) Σ_t (1 + y(t)) (1 - p(t)).
inline double mean_goodput(const StrategyTrace& trace) {
  if (trace.y.empty()) throw DomainError("mean_goodput: empty strategy");
  const auto p = penalty_sequence(trace);
  double sum = 0.0;
  for (std::size_t t = 0; t < trace.y.size(); ++t) sum += (1.0 + trace.y[t]) * (1.0 - p[t]);
  return sum / static_cast<double>(trace.y.size());
}

struct BestPrefixResult {
  std::vector<double> best_y;
  double best_goodput = 0.0;
  std::uint64_t admissible = 0;    // sequences with non-negative partial sums
  std::uint64_t maximisers = 0;    // admissible sequences attaining best_goodput
  bool constrained = false;        // T > Δ, i.e. the zero-prefix claim is non-vacuous
  bool zero_prefix_holds = true;   // every maximiser has y(1..T-Δ) = 0
  double tail_gain = 0.0;          // best_goodput - 1, gain from end-game aggression
};

/// Exhaustive search over grid^T for the goodput-maximising strategy among
/// sequences whose partial sums y(1) + ... + y(t), t < T, stay non-negative.
inline BestPrefixResult brute_force_best_prefix(int horizon, int delta, double alpha, double bound_y,
                                                std::span<const double> grid) {
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0, 1)");
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) throw DomainError("grid must contain 0");
  for (double g : grid)
    if (g > bound_y) throw DomainError("grid value exceeds Y");
  if (delta < 1 || !(delta > 1.0 / alpha + bound_y)) throw DomainError("Delta must be an integer > 1/alpha + Y");
  if (std::pow(static_cast<double>(grid.size()), horizon) > 1e8)
    throw DomainError("search space exceeds 1e8 sequences");

  BestPrefixResult res;
  res.constrained = horizon > delta;
  res.best_goodput = -std::numeric_limits<double>::infinity();
  const std::size_t prefix = res.constrained ? static_cast<std::size_t>(horizon - delta) : 0;
  constexpr double kTie = 1e-12;

  std::vector<double> y(static_cast<std::size_t>(horizon));
  std::vector<std::vector<double>> maximisers;

  // depth-first, carrying the running penalty and goodput sum
  auto visit = [&](auto&& self, std::size_t t, double penalty, double sum, double partial) -> void {
    if (t == y.size()) {
      ++res.admissible;
      const double s = sum / static_cast<double>(horizon);
      if (s > res.best_goodput + kTie) {
        res.best_goodput = s;
        maximisers.clear();
      }
      if (s >= res.best_goodput - kTie) maximisers.push_back(y);
      return;
    }
    for (double v : grid) {
      const double next_partial = partial + v;
      if (t + 1 < y.size() && next_partial < -1e-12) continue;
      y[t] = v;
      self(self, t + 1, std::max(0.0, penalty + alpha * v), sum + (1.0 + v) * (1.0 - penalty), next_partial);
    }
  };
  visit(visit, 0, 0.0, 0.0, 0.0);

  res.maximisers = maximisers.size();
  res.best_y = maximisers.front();
  for (const auto& m : maximisers)
    for (std::size_t t = 0; t < prefix; ++t)
      if (m[t] != 0.0) res.zero_prefix_holds = false;
  res.tail_gain = res.best_goodput - 1.0;
  return res;
}

/// One enumerated strategy of the robustness table.
struct StrategyRow {
  std::vector<double> y;
  double goodput = 0.0;
  bool admissible = false;
  bool maximiser = false;
};

/// Every sequence in grid^T with its goodput and admissibility; maximisers
/// are the admissible sequences within 1e-12 of the best admissible goodput.
inline std::vector<StrategyRow> strategy_table(int horizon, int delta, double alpha, double bound_y,
                                               std::span<const double> grid) {
  const BestPrefixResult best = brute_force_best_prefix(horizon, delta, alpha, bound_y, grid);
  std::vector<StrategyRow> rows;
  std::vector<std::size_t> idx(static_cast<std::size_t>(horizon), 0);
  while (true) {
    StrategyRow r;
    r.y.resize(idx.size());
    double partial = 0.0;
    r.admissible = true;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      r.y[t] = grid[idx[t]];
      partial += r.y[t];
      if (t + 1 < idx.size() && partial < -1e-12) r.admissible = false;
    }
    r.goodput = mean_goodput(StrategyTrace{r.y, bound_y, alpha, delta});
    r.maximiser = r.admissible && r.goodput >= best.best_goodput - 1e-12;
    rows.push_back(std::move(r));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == grid.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return rows;
}

struct ScriptedRate {
  MacParams params;           // fixed-CW override for the next window
  double target = 0.0;        // (1 + y) x̄
  double achieved = 0.0;      // attempt probability of the override
};

/// Fixed contention window whose attempt probability is nearest to (1 + y) x̄
/// at collision probability f. Throws DomainError when the target is outside
/// (0, 1): even CW = 1 cannot exceed one attempt per slot.
inline ScriptedRate scripted_station_rate(double y, double fair_rate, const MacParams& base, double f = 0.0) {
  const double target = (1.0 + y) * fair_rate;
  if (!(target > 0.0)) throw DomainError("scripted target attempt rate must be positive");
  if (!(target < 1.0)) throw DomainError("scripted target unreachable: saturated at CW = 1");
  MacParams p = base;
  p.max_backoff_stage = 0;
  auto rate_at = [&](int cw) {
    p.cw_min = cw;
    return attempt_probability(f, p);
  };
  // rate_at is decreasing in cw; bisect for the crossing, then pick the nearer neighbour
  int lo = 1;
  int hi = 1 << 16;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (rate_at(mid) >= target)
      lo = mid;
    else
      hi = mid;
  }
  const double r_lo = rate_at(lo);
  const double r_hi = rate_at(hi);
  const int cw = (std::abs(r_lo - target) < std::abs(r_hi - target)) ? lo : hi;
  ScriptedRate out;
  out.params = base;
  out.params.cw_min = cw;
  out.params.max_backoff_stage = 0;
  out.target = target;
  out.achieved = rate_at(cw);
  return out;
}

}  // namespace dcfguard
