#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "swarm/forces.hpp"
#include "swarm/metrics.hpp"
#include "swarm/sim.hpp"

namespace swarm::diag {

/// Random (x, v) with pairwise separation >= min_sep; positions in [-box/2, box/2]^d, velocities N(0, 1).
inline SwarmState random_state(std::size_t n, std::size_t d, double min_sep, double box, std::mt19937_64& rng) {
  SwarmState s{0.0, Points(n, d), Points(n, d)};
  std::uniform_real_distribution<double> u(-box / 2.0, box / 2.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (;;) {
      for (auto& c : s.x[i]) c = u(rng);
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) ok = dist(s.x[i], s.x[j]) >= min_sep;
      if (ok) break;
    }
    for (auto& c : s.v[i]) c = g(rng);
  }
  return s;
}

struct CheckResult {
  bool pass = false;
  double value = 0.0;  // worst observed quantity
  std::size_t samples = 0;
};

/// Max normalized cancellation residual over random collision-free states.
inline CheckResult cancellation_check(std::size_t trials, const std::vector<std::size_t>& sizes, const ForceParams& fp,
                                      std::uint64_t seed, double tol = 1e-9) {
  std::mt19937_64 rng(seed);
  CheckResult r;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = sizes[t % sizes.size()];
    const auto s = random_state(n, 2, 0.05, std::max(2.0, std::sqrt(static_cast<double>(n))), rng);
    r.value = std::max(r.value, cancellation_residual(s.x, s.v, fp));
    ++r.samples;
  }
  r.pass = r.value <= tol;
  return r;
}

/// Smallest H - (|x|^2 + |v|^2)/2 over random states; must be nonnegative.
inline CheckResult coercivity_check(std::size_t trials, const ForceParams& fp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r;
  r.value = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 2 + t % 30;
    const auto s = random_state(n, 2, 0.05, 4.0, rng);
    const double h = lyapunov(s.x, s.v, fp);
    const double moments = 0.5 * (norm2(s.x.flat()) + norm2(s.v.flat()));
    ok = ok && h >= moments;
    r.value = std::min(r.value, h - moments);
    ++r.samples;
  }
  r.pass = ok;
  return r;
}

/// Velocity-consensus run with potentials, noise, control and delays off.
/// Checks that every componentwise velocity max is non-increasing and min non-decreasing.
inline CheckResult alignment_contraction_check(SimParams p, std::size_t steps, std::uint64_t seed) {
  p.rep_strength = 0.0;
  p.form_strength = 0.0;
  p.obs_strength = 0.0;
  p.noise_idio = 0.0;
  p.noise_common = 0.0;
  p.tau_max = 0.0;
  p.leaders.leader_ids.clear();
  RunStreams rng(seed, p.N);
  auto [hist, s] = init_history(p, rng);
  const DelayMatrix delays = sample_delays(p, rng);
  ControlTrace trace;
  const Policy policy = Policy::baseline();

  auto bounds = [&](std::vector<double>& hi, std::vector<double>& lo) {
    hi.assign(p.d, -std::numeric_limits<double>::infinity());
    lo.assign(p.d, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < p.N; ++i)
      for (std::size_t k = 0; k < p.d; ++k) {
        hi[k] = std::max(hi[k], s.v[i][k]);
        lo[k] = std::min(lo[k], s.v[i][k]);
      }
  };
  std::vector<double> hi, lo, hi2, lo2;
  bounds(hi, lo);
  CheckResult r;
  r.pass = true;
  for (std::size_t step = 0; step < steps; ++step) {
    em_step(s, hist, delays, p, policy, trace, rng);
    bounds(hi2, lo2);
    for (std::size_t k = 0; k < p.d; ++k) {
      r.value = std::max({r.value, hi2[k] - hi[k], lo[k] - lo2[k]});
      if (hi2[k] > hi[k] || lo2[k] < lo[k]) r.pass = false;
    }
    hi.swap(hi2);
    lo.swap(lo2);
    ++r.samples;
  }
  return r;
}

struct DriftSample {
  double t = 0.0;
  double h = 0.0;
  double gamma = 0.0;
};

/// (t, H, Gamma) along one noise-driven trajectory; C = max Gamma / (1 + H) is the fitted drift constant.
inline std::vector<DriftSample> drift_trajectory(const RunSetup& setup, std::size_t run_index) {
  const SimParams& p = setup.params;
  RunStreams rng(run_seed(setup.base_seed, run_index), p.N);
  auto [hist, s] = init_history(p, rng);
  const DelayMatrix delays = sample_delays(p, rng);
  const ForceParams fp = ForceParams::from(p);
  const auto leaders = leader_mask(p);
  ControlTrace trace(p.leaders.leader_ids.size());
  std::vector<DriftSample> out;
  const std::size_t n = step_count(p.T, p.dt);
  for (std::size_t k = 0; k < n; ++k) {
    const CommWeights w = compute_weights(s.t, s.x, p);
    const Points u = leader_controls(s, p, setup.policy);
    out.push_back({s.t, lyapunov(s.x, s.v, fp), drift_gamma(s, hist, delays, w, u, p)});
    try {
      em_step_with(s, hist, delays, w, u, p, trace, rng, leaders);
    } catch (const CollisionError&) {
      break;
    }
  }
  return out;
}

inline double fitted_drift_constant(const std::vector<DriftSample>& xs) {
  double c = 0.0;
  for (const auto& x : xs) c = std::max(c, x.gamma / (1.0 + x.h));
  return c;
}

}  // namespace swarm::diag
