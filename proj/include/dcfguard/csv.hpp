#pragma once

// CSV emission (RFC 4180 quoting) and the fixed column schemas.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dcfguard/sim.hpp"

namespace dcfguard {

namespace csv {

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Shortest round-trippable-enough form; NaN becomes an empty field.
inline std::string number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string number(std::uint64_t v) { return std::to_string(v); }

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(fields[i]);
    }
    out_ << "\r\n";
  }

 private:
  std::ostream& out_;
};

}  // namespace csv

inline const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"time_s",        "window",      "station_id",   "attempts",
                                             "fcs_successes", "acked",       "contention_slots",
                                             "measured_rate", "fair_rate_est", "penalty",    "p_nack",
                                             "escalation"};
  return cols;
}

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{"run", "station_id", "windows", "mean_attempt_rate", "goodput_bps",
                                             "utility"};
  return cols;
}

inline void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  csv::Writer w(out);
  w.row(trace_columns());
  for (const auto& r : trace.rows) {
    w.row({csv::number(r.time_s), csv::number(r.window), std::to_string(r.station_id), csv::number(r.attempts),
           csv::number(r.fcs_successes), csv::number(r.acked), csv::number(r.contention_slots),
           csv::number(r.measured_rate), csv::number(r.fair_rate), csv::number(r.penalty), csv::number(r.p_nack),
           std::string(to_string(r.escalation))});
  }
}

inline void write_summary_csv(std::ostream& out, const std::vector<std::pair<std::string, SimTrace>>& runs) {
  csv::Writer w(out);
  w.row(summary_columns());
  for (const auto& [name, trace] : runs)
    for (const auto& s : trace.summary)
      w.row({name, std::to_string(s.station_id), csv::number(s.windows), csv::number(s.mean_attempt_rate),
             csv::number(s.goodput_bps), csv::number(s.utility)});
}

/// A generic named-column table, used for analytic curves and harness output.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const {
    csv::Writer w(out);
    w.row(columns);
    for (const auto& r : rows) w.row(r);
  }

  std::string str() const {
    std::ostringstream s;
    write(s);
    return s.str();
  }
};

}  // namespace dcfguard
