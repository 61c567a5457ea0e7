#pragma once

// Analytic tables: suppression response, virtual-MAC map, observation time,
// and the enumerated robustness harness.

#include <string>
#include <vector>

#include "dcfguard/analytics.hpp"
#include "dcfguard/csv.hpp"
#include "dcfguard/phy.hpp"
#include "dcfguard/robustness.hpp"

namespace dcfguard {

/// x/x̄ of a compliant station against ACK suppression, with the 1 - 0.4 P line.
inline Table suppression_response_table(const MacParams& params = kCompliantParams) {
  Table t{{"f", "p_nack", "normalized_attempt", "bound"}, {}};
  for (int i = 0; i <= 10; ++i) {
    const double f = 0.05 * i;
    for (int j = 0; j <= 20; ++j) {
      const double p = 0.05 * j;
      t.rows.push_back({csv::number(f), csv::number(p), csv::number(normalized_attempt(f, p, params)),
                        csv::number(1.0 - 0.4 * p)});
    }
  }
  return t;
}

/// f_v as a function of the collision probability f1 of a fair station.
inline Table virtual_failure_table(const MacParams& params = kCompliantParams) {
  Table t{{"f1", "f_v"}, {}};
  for (int i = 0; i <= 95; ++i) {
    const double f1 = 0.01 * i;
    t.rows.push_back({csv::number(f1), csv::number(virtual_failure(f1, params))});
  }
  return t;
}

/// Observation window N * E[T_slot] for n saturated compliant stations.
inline Table observation_time_table(const PhyTiming& timing, int max_stations = 30) {
  Table t{{"phy", "n", "epsilon", "samples", "mean_slot_us", "t_update_s"}, {}};
  for (double eps : {0.01, 0.02}) {
    const EstimatorConfig cfg{1.96, eps};
    for (int n = 1; n <= max_stations; ++n) {
      const FixedPoint fp = homogeneous_fixed_point(n);
      const std::vector<double> x(static_cast<std::size_t>(n), fp.x);
      const double slot = throughput(x, timing).mean_slot_us;
      t.rows.push_back({timing.preset, std::to_string(n), csv::number(eps), std::to_string(required_samples(cfg)),
                        csv::number(slot), csv::number(observation_time_s(n, timing, cfg))});
    }
  }
  return t;
}

/// Enumerated strategies with goodput, admissibility and maximiser marker.
inline Table robustness_table(int horizon, int delta, double alpha, double bound_y, std::span<const double> grid) {
  Table t{{"sequence", "goodput", "admissible", "maximiser", "zero_prefix"}, {}};
  const std::size_t prefix = horizon > delta ? static_cast<std::size_t>(horizon - delta) : 0;
  for (const auto& r : strategy_table(horizon, delta, alpha, bound_y, grid)) {
    std::string seq;
    bool zero_prefix = true;
    for (std::size_t i = 0; i < r.y.size(); ++i) {
      seq += (i ? " " : "") + csv::number(r.y[i]);
      if (i < prefix && r.y[i] != 0.0) zero_prefix = false;
    }
    t.rows.push_back({seq, csv::number(r.goodput), r.admissible ? "1" : "0", r.maximiser ? "1" : "0",
                      zero_prefix ? "1" : "0"});
  }
  return t;
}

}  // namespace dcfguard
