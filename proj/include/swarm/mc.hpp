#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "swarm/core.hpp"
#include "swarm/rng.hpp"
#include "swarm/sim.hpp"

namespace swarm {

/// Standard normal quantile (Acklam's rational approximation, one Halley refinement).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal quantile needs p in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  double x;
  if (p < lo) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - lo) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

struct WilsonInterval {
  std::size_t k = 0;
  std::size_t n = 0;
  double p_hat = 0.0;
  double center = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double conf = 0.95;
};

inline constexpr double kZ95 = 1.959964;

/// Two-sided Wilson score interval for k successes in n trials.
inline WilsonInterval wilson(std::size_t k, std::size_t n, double conf = 0.95) {
  if (n == 0) throw std::invalid_argument("wilson interval needs n >= 1");
  if (k > n) throw std::invalid_argument("wilson interval needs k <= n");
  const double z = conf == 0.95 ? kZ95 : normal_quantile(0.5 + conf / 2.0);
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {k, n, ph, center, std::max(0.0, center - half), std::min(1.0, center + half), conf};
}

struct ChanceEstimate {
  std::size_t M = 0;
  WilsonInterval tube;
  double frac_vel = 0.0;
  double frac_form = 0.0;
  double frac_safe = 0.0;

  // sample means over initialized runs
  double mean_e_vel = 0.0;
  double mean_e_form = 0.0;
  double mean_min_dist = 0.0;
  double mean_l1_cost = 0.0;
  double mean_duty = 0.0;
  double mean_int_e_vel = 0.0;
  double mean_int_e_safe = 0.0;
  double mean_h_max = 0.0;
  double max_cancel = 0.0;
  std::optional<double> mean_hitting_time;

  std::size_t hits = 0;
  std::size_t collisions = 0;
  std::size_t init_failures = 0;
};

/// Runs body(i) for i in [0, count) on up to `workers` threads. Exceptions are rethrown.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Aggregates records in index order, so the result does not depend on execution order.
inline ChanceEstimate summarize(const std::vector<RunRecord>& records, double conf = 0.95) {
  if (records.empty()) throw std::invalid_argument("no records to summarize");
  ChanceEstimate e;
  e.M = records.size();
  std::size_t k = 0, kv = 0, kf = 0, ks = 0, ok = 0;
  double hit_sum = 0.0;
  for (const auto& r : records) {
    if (r.init_failed) {
      ++e.init_failures;
      continue;
    }
    ++ok;
    k += r.tube_all;
    kv += r.tube_vel;
    kf += r.tube_form;
    ks += r.tube_safe;
    e.collisions += r.collided;
    e.mean_e_vel += r.e_vel;
    e.mean_e_form += r.e_form;
    e.mean_min_dist += r.min_dist;
    e.mean_l1_cost += r.l1_cost;
    e.mean_duty += r.duty_fraction;
    e.mean_int_e_vel += r.int_e_vel;
    e.mean_int_e_safe += r.int_e_safe;
    e.mean_h_max += r.h_max;
    e.max_cancel = std::max(e.max_cancel, r.cancel_max);
    if (r.hitting_time) {
      ++e.hits;
      hit_sum += *r.hitting_time;
    }
  }
  if (ok == 0) throw std::runtime_error("all runs failed to initialize");
  const double m = static_cast<double>(e.M);
  const double mo = static_cast<double>(ok);
  e.tube = wilson(k, e.M, conf);
  e.frac_vel = static_cast<double>(kv) / m;
  e.frac_form = static_cast<double>(kf) / m;
  e.frac_safe = static_cast<double>(ks) / m;
  for (double* f : {&e.mean_e_vel, &e.mean_e_form, &e.mean_min_dist, &e.mean_l1_cost, &e.mean_duty,
                    &e.mean_int_e_vel, &e.mean_int_e_safe, &e.mean_h_max})
    *f /= mo;
  if (e.hits > 0) e.mean_hitting_time = hit_sum / static_cast<double>(e.hits);
  return e;
}

struct MonteCarloResult {
  ChanceEstimate estimate;
  std::vector<RunRecord> records;
};

/// M independent realizations with run indices 0..M-1 and seeds mixed from base_seed.
inline MonteCarloResult estimate_chance(const RunSetup& setup, std::size_t M, std::size_t workers = 1) {
  if (M == 0) throw std::invalid_argument("Monte Carlo needs M >= 1");
  std::vector<RunRecord> records(M);
  parallel_for(M, workers, [&](std::size_t i) { records[i] = run(setup, i); });
  ChanceEstimate est = summarize(records);
  return {std::move(est), std::move(records)};
}

struct CostBreakdown {
  double time = 0.0;
  double control = 0.0;    // lambda1 * mean l1
  double velocity = 0.0;   // lambda2 * mean int E_vel
  double safety = 0.0;     // lambda3 * mean int E_safe
  double formation = 0.0;  // lambda4 * mean terminal E_form
  double total = 0.0;
};

/// Sample-average of T + l1 * int|u| + int (l2 E_vel + l3 E_safe) + l4 E_form(T).
inline CostBreakdown cost(const std::vector<RunRecord>& records, const CostWeights& w, double T) {
  double l1 = 0.0, iv = 0.0, is = 0.0, ef = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r.init_failed) continue;
    ++n;
    l1 += r.l1_cost;
    iv += r.int_e_vel;
    is += r.int_e_safe;
    ef += r.e_form;
  }
  if (n == 0) throw std::invalid_argument("cost needs at least one initialized record");
  const double m = static_cast<double>(n);
  CostBreakdown c;
  c.time = T;
  c.control = w.lambda1 * l1 / m;
  c.velocity = w.lambda2 * iv / m;
  c.safety = w.lambda3 * is / m;
  c.formation = w.lambda4 * ef / m;
  c.total = c.time + c.control + c.velocity + c.safety + c.formation;
  return c;
}

/// Mean over hitting records of tau + l1 * int_0^tau |u| + int_0^tau (l2 E_vel + l3 E_safe).
inline std::optional<double> mean_hitting_cost(const std::vector<RunRecord>& records, const CostWeights& w) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!r.hitting_time) continue;
    ++n;
    sum += *r.hitting_time + w.lambda1 * r.l1_to_hit + w.lambda2 * r.int_e_vel_to_hit +
           w.lambda3 * r.int_e_safe_to_hit;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

enum class SweepAxis { T, Leaders, TauMax };

inline SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "T") return SweepAxis::T;
  if (s == "leaders") return SweepAxis::Leaders;
  if (s == "tau_max") return SweepAxis::TauMax;
  throw ConfigError("unknown sweep axis '" + s + "'");
}

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::T: return "T";
    case SweepAxis::Leaders: return "leaders";
    case SweepAxis::TauMax: return "tau_max";
  }
  return "?";
}

struct SweepPoint {
  double value = 0.0;
  std::uint64_t seed = 0;
  MonteCarloResult result;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::T;
  std::vector<SweepPoint> points;
};

/// Parameters with one axis value applied; throws ConfigError if the result is invalid.
inline SimParams apply_axis(SimParams p, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::T:
      p.T = value;
      break;
    case SweepAxis::TauMax:
      p.tau_max = value;
      break;
    case SweepAxis::Leaders: {
      if (!(value >= 0.0) || value != std::floor(value))
        throw ConfigError("leader count must be a nonnegative integer");
      if (value > static_cast<double>(p.N)) throw ConfigError("leader count exceeds N");
      p.leaders.leader_ids = first_leaders(static_cast<std::size_t>(value));
      break;
    }
  }
  auto report = validate_params(p);
  if (!report.empty()) throw ConfigError(std::string(to_string(axis)) + " value invalid: " + report.front());
  return p;
}

/// Seed of one sweep point: depends on the axis and the value itself, not its list position.
inline std::uint64_t sweep_point_seed(std::uint64_t base_seed, SweepAxis axis, double value) {
  return mix_seed(base_seed, splitmix64(static_cast<std::uint64_t>(axis) + 1) ^ std::bit_cast<std::uint64_t>(value));
}

inline SweepResult sweep(SweepAxis axis, const std::vector<double>& values, const RunSetup& base, std::size_t M,
                         std::size_t workers = 1) {
  SweepResult out{axis, {}};
  std::vector<SimParams> configs;
  configs.reserve(values.size());
  for (double v : values) configs.push_back(apply_axis(base.params, axis, v));
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunSetup s = base;
    s.params = configs[i];
    s.base_seed = sweep_point_seed(base.base_seed, axis, values[i]);
    out.points.push_back({values[i], s.base_seed, estimate_chance(s, M, workers)});
  }
  return out;
}

}  // namespace swarm
