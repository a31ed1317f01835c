#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "swarm/comm.hpp"
#include "swarm/control.hpp"
#include "swarm/core.hpp"
#include "swarm/forces.hpp"
#include "swarm/history.hpp"
#include "swarm/metrics.hpp"
#include "swarm/rng.hpp"

namespace swarm {

class CollisionError : public std::runtime_error {
 public:
  CollisionError(double t, double min_dist)
      : std::runtime_error("collision at t=" + std::to_string(t)), time(t), distance(min_dist) {}
  double time;
  double distance;
};

/// Per-realization outcome. Terminal quantities refer to t = T, or to the
/// collision time when the run was cut short.
struct RunRecord {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;

  double e_vel = 0.0;
  double e_form = 0.0;
  double e_safe = 0.0;
  double min_dist = 0.0;
  bool tube_vel = false;
  bool tube_form = false;
  bool tube_safe = false;
  bool tube_all = false;

  std::optional<double> hitting_time;
  double l1_to_hit = 0.0;
  double int_e_vel_to_hit = 0.0;
  double int_e_safe_to_hit = 0.0;

  bool init_failed = false;
  bool collided = false;
  std::optional<double> collision_time;

  double l1_cost = 0.0;
  double duty_fraction = 0.0;
  double int_e_vel = 0.0;
  double int_e_safe = 0.0;
  double min_dist_run = 0.0;

  double h_max = 0.0;
  double cancel_max = 0.0;
  double drift_ratio_max = 0.0;  // max of Gamma / (1 + H) along the path
  std::size_t steps = 0;

  bool operator==(const RunRecord&) const = default;
};

/// Euler-Maruyama step with weights and controls already evaluated at the step start.
inline void em_step_with(SwarmState& s, VelocityHistory& hist, const DelayMatrix& delays, const CommWeights& w,
                         const Points& u, const SimParams& p, ControlTrace& trace, RunStreams& rng,
                         const std::vector<bool>& is_leader) {
  const std::size_t n = s.x.size();
  const std::size_t d = s.x.dim();
  const double dt = p.dt;
  const double sq = std::sqrt(dt);

  Points drift(n, d);
  for (std::size_t i = 0; i < n; ++i) velocity_drift(i, s, hist, delays, w, u[i], p, is_leader, drift[i]);

  Vec common(d, 0.0);
  if (p.noise_common > 0.0)
    for (auto& c : common) c = p.noise_common * sq * rng.common();

  Points v_next(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto vn = v_next[i];
    const auto vi = s.v[i];
    const auto fi = drift[i];
    for (std::size_t k = 0; k < d; ++k) {
      double inc = fi[k] * dt;
      if (p.noise_idio > 0.0) inc += p.noise_idio * sq * rng.idio[i]();
      vn[k] = vi[k] + inc + common[k];
    }
  }
  auto xf = s.x.flat();
  const auto vf = s.v.flat();
  for (std::size_t m = 0; m < xf.size(); ++m) xf[m] += vf[m] * dt;

  accumulate(trace, u, p.leaders.leader_ids, dt);
  s.v = std::move(v_next);
  s.t += dt;
  hist.push(s.t, s.v);

  const double md = min_pair_dist(s.x);
  if (!(md >= kCollisionDistance)) throw CollisionError(s.t, md);
}

/// One step: evaluates weights and leader controls from the current state, then integrates.
inline void em_step(SwarmState& s, VelocityHistory& hist, const DelayMatrix& delays, const SimParams& p,
                    const Policy& policy, ControlTrace& trace, RunStreams& rng) {
  const CommWeights w = compute_weights(s.t, s.x, p);
  const Points u = leader_controls(s, p, policy);
  em_step_with(s, hist, delays, w, u, p, trace, rng, leader_mask(p));
}

using StateObserver = std::function<void(const SwarmState&)>;

/// Everything a single realization needs apart from its index.
struct RunSetup {
  SimParams params;
  Policy policy;
  TubeSpec tube;
  FormationSpec formation;
  std::uint64_t base_seed = 0;
};

namespace detail {

struct RunAccumulator {
  double int_e_vel = 0.0;
  double int_e_safe = 0.0;
  double h_max = 0.0;
  double cancel_max = 0.0;
  double ratio_max = -std::numeric_limits<double>::infinity();
  double min_dist = std::numeric_limits<double>::infinity();
};

inline void fill_terminal(RunRecord& r, const MetricsRecord& m) {
  r.e_vel = m.e_vel;
  r.e_form = m.e_form;
  r.e_safe = m.e_safe;
  r.min_dist = m.min_dist;
  r.tube_vel = m.tube_vel;
  r.tube_form = m.tube_form;
  r.tube_safe = m.tube_safe;
  r.tube_all = m.tube_all;
}

}  // namespace detail

inline RunRecord run(const RunSetup& setup, std::size_t run_index, const StateObserver& observe = {}) {
  const SimParams& p = setup.params;
  RunRecord rec;
  rec.run_index = run_index;
  rec.seed = run_seed(setup.base_seed, run_index);
  RunStreams rng(rec.seed, p.N);

  SwarmState s;
  VelocityHistory hist;
  try {
    std::tie(hist, s) = init_history(p, rng);
  } catch (const InitError&) {
    rec.init_failed = true;
    return rec;
  }
  const DelayMatrix delays = sample_delays(p, rng);
  const ForceParams fp = ForceParams::from(p);
  const auto is_leader = leader_mask(p);
  const std::size_t n_steps = step_count(p.T, p.dt);
  ControlTrace trace(p.leaders.leader_ids.size());
  detail::RunAccumulator acc;

  auto evaluate = [&](const CommWeights* w, const Points* u) {
    const MetricsRecord m = in_tube(s.x, s.v, p.v_star, setup.tube, setup.formation);
    if (!rec.hitting_time && m.tube_all) {
      rec.hitting_time = s.t;
      rec.l1_to_hit = trace.l1_cost;
      rec.int_e_vel_to_hit = acc.int_e_vel;
      rec.int_e_safe_to_hit = acc.int_e_safe;
    }
    const double h = lyapunov(s.x, s.v, fp);
    acc.h_max = std::max(acc.h_max, h);
    acc.min_dist = std::min(acc.min_dist, m.min_dist);
    if (fp.rep_strength > 0.0) acc.cancel_max = std::max(acc.cancel_max, cancellation_residual(s.x, s.v, fp));
    if (w && u) acc.ratio_max = std::max(acc.ratio_max, drift_gamma(s, hist, delays, *w, *u, p) / (1.0 + h));
    return m;
  };

  auto finish = [&](const MetricsRecord& m) {
    detail::fill_terminal(rec, m);
    rec.l1_cost = trace.l1_cost;
    rec.duty_fraction = trace.duty_fraction();
    rec.int_e_vel = acc.int_e_vel;
    rec.int_e_safe = acc.int_e_safe;
    rec.h_max = acc.h_max;
    rec.cancel_max = acc.cancel_max;
    rec.drift_ratio_max = std::isfinite(acc.ratio_max) ? acc.ratio_max : 0.0;
    rec.min_dist_run = acc.min_dist;
    rec.steps = trace.total_steps;
  };

  if (observe) observe(s);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const CommWeights w = compute_weights(s.t, s.x, p);
    const Points u = leader_controls(s, p, setup.policy);
    const MetricsRecord m = evaluate(&w, &u);
    acc.int_e_vel += m.e_vel * p.dt;
    acc.int_e_safe += m.e_safe * p.dt;
    try {
      em_step_with(s, hist, delays, w, u, p, trace, rng, is_leader);
    } catch (const CollisionError& e) {
      rec.collided = true;
      rec.collision_time = e.time;
      if (observe) observe(s);
      MetricsRecord mc = in_tube(s.x, s.v, p.v_star, setup.tube, setup.formation);
      mc.tube_safe = mc.tube_all = false;
      acc.min_dist = std::min(acc.min_dist, mc.min_dist);
      acc.h_max = std::numeric_limits<double>::infinity();
      finish(mc);
      return rec;
    } catch (const SingularInput&) {
      rec.collided = true;
      rec.collision_time = s.t;
      MetricsRecord mc = in_tube(s.x, s.v, p.v_star, setup.tube, setup.formation);
      mc.tube_safe = mc.tube_all = false;
      acc.h_max = std::numeric_limits<double>::infinity();
      finish(mc);
      return rec;
    }
    if (observe) observe(s);
  }
  finish(evaluate(nullptr, nullptr));
  return rec;
}

}  // namespace swarm
