#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "bearing_swarm/errors.hpp"
#include "bearing_swarm/sim.hpp"

namespace bearing_swarm {

/// Render a double with 17 significant digits: enough for exact double
/// round-trips, so traces are byte-stable across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Column header for an n-agent trace.
inline std::string trace_csv_header(int n) {
  std::string h = "t";
  for (int i = 1; i <= n; ++i) {
    const std::string s = std::to_string(i);
    h += ",x" + s + ",y" + s + ",theta" + s + ",xhat" + s + ",yhat" + s;
  }
  h += ",delta_norm,ptilde_norm,bearing_err_max,min_edge_dist,W1";
  return h;
}

inline void write_trace_csv(const SimTrace& trace, int agent_count, std::ostream& os) {
  os << trace_csv_header(agent_count) << "\n";
  for (const TraceRow& row : trace.rows) {
    os << format_double(row.t);
    for (size_t i = 0; i < row.agents.size(); ++i) {
      os << ',' << format_double(row.agents[i].x) << ',' << format_double(row.agents[i].y)
         << ',' << format_double(row.agents[i].theta) << ','
         << format_double(row.estimates[i].x()) << ',' << format_double(row.estimates[i].y());
    }
    os << ',' << format_double(row.metrics.delta_norm) << ','
       << format_double(row.metrics.ptilde_norm) << ','
       << format_double(row.metrics.bearing_err_max) << ','
       << format_double(row.metrics.min_edge_dist) << ','
       << format_double(row.metrics.lyapunov_w1) << "\n";
  }
}

inline void write_trace_csv(const SimTrace& trace, int agent_count, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SimError("cannot open " + path + " for writing");
  write_trace_csv(trace, agent_count, os);
}

inline const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::CollisionFailure: return "collision";
    case RunStatus::NonFiniteState: return "nonfinite";
  }
  return "unknown";
}

/// One-row digest of a run, for sweep aggregation and quick assertions.
inline void write_summary_csv(const SimResult& result, std::ostream& os) {
  os << "status,rows,t_end,delta_norm_initial,delta_norm_final,ptilde_norm_initial,"
        "ptilde_norm_final,bearing_err_max_final,min_edge_dist_overall,W1_final,"
        "failure_time,failure_edge\n";
  const bool has_rows = !result.trace.rows.empty();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const TraceRow* first = has_rows ? &result.trace.rows.front() : nullptr;
  const TraceRow* last = has_rows ? &result.trace.rows.back() : nullptr;
  os << run_status_name(result.status) << ',' << result.trace.rows.size() << ','
     << format_double(last ? last->t : nan) << ','
     << format_double(first ? first->metrics.delta_norm : nan) << ','
     << format_double(last ? last->metrics.delta_norm : nan) << ','
     << format_double(first ? first->metrics.ptilde_norm : nan) << ','
     << format_double(last ? last->metrics.ptilde_norm : nan) << ','
     << format_double(last ? last->metrics.bearing_err_max : nan) << ','
     << format_double(result.min_edge_dist_overall) << ','
     << format_double(last ? last->metrics.lyapunov_w1 : nan) << ',';
  if (result.status == RunStatus::Completed)
    os << ',';
  else {
    os << format_double(result.failure_time) << ',';
    if (result.failure_tail > 0)
      os << result.failure_tail << '-' << result.failure_head;
  }
  os << "\n";
}

inline void write_summary_csv(const SimResult& result, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SimError("cannot open " + path + " for writing");
  write_summary_csv(result, os);
}

}  // namespace bearing_swarm
