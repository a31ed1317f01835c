#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/core.hpp"
#include "swarm/vec.hpp"

namespace swarm {

/// Leader policy: continuous baseline feedback, or the same signal gated by |u|_2 > theta.
struct Policy {
  enum class Kind { Baseline, Sparse };
  Kind kind = Kind::Baseline;
  double theta = 0.0;

  static Policy baseline() { return {Kind::Baseline, 0.0}; }
  static Policy sparse(double theta) {
    if (theta < 0.0) throw std::invalid_argument("sparsity threshold must be nonnegative");
    return {Kind::Sparse, theta};
  }
  bool operator==(const Policy&) const = default;
};

inline const char* to_string(Policy::Kind k) { return k == Policy::Kind::Baseline ? "baseline" : "sparse"; }

inline Policy parse_policy(const std::string& name, double theta) {
  if (name == "baseline") return Policy::baseline();
  if (name == "sparse") return Policy::sparse(theta);
  throw ConfigError("unknown policy '" + name + "'");
}

/// Accumulated actuation: sum over leaders of int |u_i|_2 dt, plus pooled duty counts.
struct ControlTrace {
  double l1_cost = 0.0;
  std::vector<std::size_t> duty_samples;  // per leader: steps with nonzero actuation
  std::size_t total_steps = 0;

  explicit ControlTrace(std::size_t n_leaders = 0) : duty_samples(n_leaders, 0) {}

  /// Fraction of (leader, step) pairs with nonzero control.
  double duty_fraction() const {
    if (total_steps == 0 || duty_samples.empty()) return 0.0;
    std::size_t on = 0;
    for (auto c : duty_samples) on += c;
    return static_cast<double>(on) / static_cast<double>(total_steps * duty_samples.size());
  }
};

inline Vec centroid(const Points& x) {
  Vec c(x.dim(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < x.dim(); ++k) c[k] += x[i][k];
  for (auto& ck : c) ck /= static_cast<double>(x.size());
  return c;
}

/// clip_[-M, M] of -k_p (x_i - xbar) - k_d (v_i - v*), componentwise.
inline void raw_feedback(std::size_t i, const SwarmState& s, std::span<const double> xbar, const SimParams& p,
                         std::span<double> out) {
  const auto& lc = p.leaders;
  const auto xi = s.x[i];
  const auto vi = s.v[i];
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double u = -lc.gain_p * (xi[k] - xbar[k]) - lc.gain_d * (vi[k] - p.v_star[k]);
    out[k] = std::clamp(u, -lc.M, lc.M);
  }
}

inline Vec raw_feedback(std::size_t i, const SwarmState& s, const SimParams& p) {
  Vec out(s.x.dim());
  raw_feedback(i, s, centroid(s.x), p, out);
  return out;
}

inline void apply_policy(std::span<double> u, const Policy& policy) {
  if (policy.kind == Policy::Kind::Baseline) return;
  if (policy.theta < 0.0) throw std::invalid_argument("sparsity threshold must be nonnegative");
  if (!(norm(u) > policy.theta)) std::fill(u.begin(), u.end(), 0.0);
}

inline Vec apply_policy(Vec u, const Policy& policy) {
  apply_policy(std::span<double>(u), policy);
  return u;
}

/// Controls for every agent (rows of followers stay zero).
inline Points leader_controls(const SwarmState& s, const SimParams& p, const Policy& policy) {
  Points u(s.x.size(), s.x.dim());
  if (p.leaders.leader_ids.empty()) return u;
  const Vec xbar = centroid(s.x);
  for (auto id : p.leaders.leader_ids) {
    raw_feedback(id, s, xbar, p, u[id]);
    apply_policy(u[id], policy);
  }
  return u;
}

/// Left-endpoint accumulation of one step of leader actuation.
inline void accumulate(ControlTrace& trace, const Points& u, const std::vector<std::size_t>& leader_ids, double dt) {
  if (trace.duty_samples.size() != leader_ids.size()) trace.duty_samples.assign(leader_ids.size(), 0);
  double sum = 0.0;
  for (std::size_t l = 0; l < leader_ids.size(); ++l) {
    const double m = norm(u[leader_ids[l]]);
    sum += m;
    if (m > 0.0) ++trace.duty_samples[l];
  }
  trace.l1_cost += dt * sum;
  ++trace.total_steps;
}

}  // namespace swarm
