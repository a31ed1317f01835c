#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "swarm/config.hpp"
#include "swarm/mc.hpp"
#include "swarm/sim.hpp"

namespace swarm::io {

/// Round-trippable decimal with 17 significant digits; non-finite values become JSON null.
inline std::string json_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string json_number(const std::optional<double>& x) { return x ? json_number(*x) : "null"; }

inline std::string fixed4(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

inline std::string fixed4(const std::optional<double>& x) { return x ? fixed4(*x) : ""; }

/// One RunRecord as a single-line JSON object with a fixed key order.
inline std::string to_json(const RunRecord& r) {
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::string s = "{";
  s += "\"run_index\":" + std::to_string(r.run_index);
  s += ",\"seed\":" + std::to_string(r.seed);
  s += ",\"init_failed\":" + std::string(b(r.init_failed));
  s += ",\"e_vel\":" + json_number(r.e_vel);
  s += ",\"e_form\":" + json_number(r.e_form);
  s += ",\"e_safe\":" + json_number(r.e_safe);
  s += ",\"min_dist\":" + json_number(r.min_dist);
  s += ",\"tube_vel\":" + std::string(b(r.tube_vel));
  s += ",\"tube_form\":" + std::string(b(r.tube_form));
  s += ",\"tube_safe\":" + std::string(b(r.tube_safe));
  s += ",\"tube_all\":" + std::string(b(r.tube_all));
  s += ",\"hitting_time\":" + json_number(r.hitting_time);
  s += ",\"collided\":" + std::string(b(r.collided));
  s += ",\"collision_time\":" + json_number(r.collision_time);
  s += ",\"l1_cost\":" + json_number(r.l1_cost);
  s += ",\"duty_fraction\":" + json_number(r.duty_fraction);
  s += ",\"int_e_vel\":" + json_number(r.int_e_vel);
  s += ",\"int_e_safe\":" + json_number(r.int_e_safe);
  s += ",\"l1_to_hit\":" + json_number(r.l1_to_hit);
  s += ",\"int_e_vel_to_hit\":" + json_number(r.int_e_vel_to_hit);
  s += ",\"int_e_safe_to_hit\":" + json_number(r.int_e_safe_to_hit);
  s += ",\"min_dist_run\":" + json_number(r.min_dist_run);
  s += ",\"h_max\":" + json_number(r.h_max);
  s += ",\"cancel_max\":" + json_number(r.cancel_max);
  s += ",\"drift_ratio_max\":" + json_number(r.drift_ratio_max);
  s += ",\"steps\":" + std::to_string(r.steps);
  s += "}";
  return s;
}

inline void write_jsonl(std::ostream& os, const std::vector<RunRecord>& records) {
  for (const auto& r : records) os << to_json(r) << '\n';
}

inline void write_provenance(std::ostream& os, const Scenario& s) { os << "# config_hash=" << config_hash(s) << '\n'; }

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "policy",        "M",           "p_vel",       "p_form",         "p_safe",          "p_tube", "k",
      "ci_lo",         "ci_hi",       "mean_e_vel",  "mean_e_form",    "mean_min_dist",   "mean_l1_cost",
      "mean_duty",     "mean_total_cost", "mean_hitting_time", "collisions", "init_failures"};
  return cols;
}

inline std::vector<std::string> summary_values(const std::string& policy, const ChanceEstimate& e,
                                               const CostBreakdown& c) {
  return {policy,
          std::to_string(e.M),
          fixed4(e.frac_vel),
          fixed4(e.frac_form),
          fixed4(e.frac_safe),
          fixed4(e.tube.p_hat),
          std::to_string(e.tube.k),
          fixed4(e.tube.lo),
          fixed4(e.tube.hi),
          fixed4(e.mean_e_vel),
          fixed4(e.mean_e_form),
          fixed4(e.mean_min_dist),
          fixed4(e.mean_l1_cost),
          fixed4(e.mean_duty),
          fixed4(c.total),
          fixed4(e.mean_hitting_time),
          std::to_string(e.collisions),
          std::to_string(e.init_failures)};
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

/// Header comment, column names, one data row.
inline void write_summary_csv(std::ostream& os, const Scenario& s, const std::string& policy, const ChanceEstimate& e,
                              const CostBreakdown& c) {
  write_provenance(os, s);
  write_csv_row(os, summary_columns());
  write_csv_row(os, summary_values(policy, e, c));
}

/// Metric-per-row layout with one column per policy.
inline void write_compare_csv(std::ostream& os, const Scenario& s, const ChanceEstimate& base,
                              const CostBreakdown& base_cost, const ChanceEstimate& sparse,
                              const CostBreakdown& sparse_cost) {
  write_provenance(os, s);
  const auto cols = summary_columns();
  const auto bv = summary_values("baseline", base, base_cost);
  const auto sv = summary_values("sparse", sparse, sparse_cost);
  os << "metric,baseline,sparse\n";
  for (std::size_t i = 1; i < cols.size(); ++i) os << cols[i] << ',' << bv[i] << ',' << sv[i] << '\n';
}

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {"axis",    "value",        "seed",        "M",
                                                "k",       "p_tube",       "ci_lo",       "ci_hi",
                                                "p_vel",   "p_form",       "p_safe",      "mean_l1_cost",
                                                "mean_duty", "mean_total_cost", "collisions"};
  return cols;
}

inline void write_sweep_csv(std::ostream& os, const Scenario& s, const SweepResult& sw) {
  write_provenance(os, s);
  write_csv_row(os, sweep_columns());
  for (const auto& pt : sw.points) {
    const auto& e = pt.result.estimate;
    const double T = sw.axis == SweepAxis::T ? pt.value : s.params.T;
    const CostBreakdown c = cost(pt.result.records, s.weights, T);
    write_csv_row(os, {to_string(sw.axis), fixed4(pt.value), std::to_string(pt.seed), std::to_string(e.M),
                       std::to_string(e.tube.k), fixed4(e.tube.p_hat), fixed4(e.tube.lo), fixed4(e.tube.hi),
                       fixed4(e.frac_vel), fixed4(e.frac_form), fixed4(e.frac_safe), fixed4(e.mean_l1_cost),
                       fixed4(e.mean_duty), fixed4(c.total), std::to_string(e.collisions)});
  }
}

/// Trajectory rows: t, agent, x0..x{d-1}, v0..v{d-1}.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(std::ostream& os, std::size_t d) : os_(os) {
    os_ << "t,agent";
    for (std::size_t k = 0; k < d; ++k) os_ << ",x" << k;
    for (std::size_t k = 0; k < d; ++k) os_ << ",v" << k;
    os_ << '\n';
  }

  void operator()(const SwarmState& s) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      os_ << json_number(s.t) << ',' << i;
      for (double c : s.x[i]) os_ << ',' << json_number(c);
      for (double c : s.v[i]) os_ << ',' << json_number(c);
      os_ << '\n';
    }
  }

 private:
  std::ostream& os_;
};

}  // namespace swarm::io
