#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/vec.hpp"

namespace swarm {

/// Base class for errors that indicate a malformed configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AvailabilityMode { Always, Range };

inline AvailabilityMode parse_availability_mode(const std::string& s) {
  if (s == "always") return AvailabilityMode::Always;
  if (s == "range") return AvailabilityMode::Range;
  throw ConfigError("unknown availability mode '" + s + "'");
}

inline const char* to_string(AvailabilityMode m) {
  return m == AvailabilityMode::Always ? "always" : "range";
}

struct LeaderConfig {
  std::vector<std::size_t> leader_ids;  // 0-based agent indices
  double b = 1.0;                       // velocity pinning, uniform across leaders
  std::vector<double> B;                // d*d row-major actuation gain; empty = identity
  double M = 1.0;                       // componentwise actuator bound
  double gain_p = 0.5;
  double gain_d = 1.0;
  std::optional<double> theta;          // sparsity threshold; unset = 0.2 * M

  double threshold() const { return theta.value_or(0.2 * M); }
};

struct InitConfig {
  double box = 10.0;         // positions drawn uniformly in [0, box]^d
  double min_sep = 0.3;      // rejection-sampling minimum pairwise separation
  double vel_spread = 0.5;   // std-dev of initial velocity around v_star
};

struct SimParams {
  std::size_t N = 100;
  std::size_t d = 2;
  std::size_t K = 7;
  double eps = 0.01;
  double delta = 0.1;
  double tau_max = 0.25;
  double dt = 0.01;
  double T = 8.0;
  double phi_beta = 2.0;

  AvailabilityMode availability = AvailabilityMode::Always;
  double comm_range = 5.0;

  double rep_strength = 1.0;
  double rep_power = 2.0;
  double form_strength = 0.05;
  double obs_strength = 0.0;
  Vec obs_center{0.0, 0.0};
  Vec v_star{1.0, 0.0};

  double noise_idio = 0.1;
  double noise_common = 0.05;

  LeaderConfig leaders;
  InitConfig init;
};

struct TubeSpec {
  double eps_v = 0.6;
  double delta_f = 3.0;
  double rho = 0.03;
  double alpha = 0.05;
  double psi_power = 2.0;
};

struct CostWeights {
  double lambda1 = 0.1;
  double lambda2 = 0.05;
  double lambda3 = 0.01;
  double lambda4 = 0.05;
};

struct SwarmState {
  double t = 0.0;
  Points x;
  Points v;
};

/// Target pairwise distances d*_ij (N x N, row-major, symmetric, zero diagonal).
struct FormationSpec {
  std::size_t N = 0;
  std::vector<double> d_star;

  double operator()(std::size_t i, std::size_t j) const { return d_star[i * N + j]; }
};

/// Number of snapshots kept for delayed lookups: ceil(tau_max/dt) + 1.
/// The small guard absorbs representation error in ratios such as 0.25/0.01.
inline std::size_t history_length(double tau_max, double dt) {
  const double r = tau_max / dt;
  return static_cast<std::size_t>(std::ceil(r - 1e-9 * std::max(1.0, r))) + 1;
}

/// Number of Euler steps covering [0, T].
inline std::size_t step_count(double T, double dt) {
  const double r = T / dt;
  return static_cast<std::size_t>(std::ceil(r - 1e-9 * std::max(1.0, r)));
}

inline std::vector<std::size_t> first_leaders(std::size_t count) {
  std::vector<std::size_t> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = i;
  return ids;
}

inline SimParams default_params() {
  SimParams p;
  p.leaders.leader_ids = first_leaders(8);
  return p;
}

/// Actuation gain entry B(row, col) for the configured dimension.
inline double gain_entry(const LeaderConfig& lc, std::size_t d, std::size_t row, std::size_t col) {
  if (lc.B.empty()) return row == col ? 1.0 : 0.0;
  return lc.B[row * d + col];
}

using ValidationReport = std::vector<std::string>;

inline ValidationReport validate_params(const SimParams& p) {
  ValidationReport r;
  auto need = [&r](bool ok, const char* msg) {
    if (!ok) r.emplace_back(msg);
  };
  need(p.N >= 2, "N must be at least 2");
  need(p.d >= 1, "d must be at least 1");
  need(p.K >= 1, "K must be at least 1");
  need(p.N < 2 || p.K <= p.N - 1, "K exceeds N-1");
  need(p.eps > 0.0, "eps must be positive");
  need(p.delta > 0.0, "delta must be positive");
  need(p.tau_max >= 0.0, "tau_max must be nonnegative");
  need(p.dt > 0.0, "dt must be positive");
  need(p.T > 0.0, "T must be positive");
  need(!(p.dt > 0.0 && p.T > 0.0) || p.dt <= p.T, "dt must not exceed T");
  need(p.phi_beta >= 0.0, "phi_beta must be nonnegative");
  need(p.comm_range >= 0.0, "comm_range must be nonnegative");
  need(p.rep_strength >= 0.0, "rep_strength must be nonnegative (0 disables repulsion)");
  need(p.rep_power > 0.0, "rep_power must be positive");
  need(p.form_strength >= 0.0, "form_strength must be nonnegative");
  need(p.obs_strength >= 0.0, "obs_strength must be nonnegative");
  need(p.noise_idio >= 0.0, "noise_idio must be nonnegative");
  need(p.noise_common >= 0.0, "noise_common must be nonnegative");
  need(p.obs_center.size() == p.d, "obs_center dimension differs from d");
  need(p.v_star.size() == p.d, "v_star dimension differs from d");

  const auto& lc = p.leaders;
  need(lc.leader_ids.size() <= p.N, "leader count exceeds N");
  bool ids_ok = true;
  std::vector<bool> seen(p.N, false);
  for (auto id : lc.leader_ids) {
    if (id >= p.N || seen[id]) {
      ids_ok = false;
      break;
    }
    seen[id] = true;
  }
  need(ids_ok, "leader ids must be distinct and below N");
  need(lc.b >= 0.0, "leader pinning b must be nonnegative");
  need(lc.B.empty() || lc.B.size() == p.d * p.d, "leader gain B must be d*d");
  need(lc.M > 0.0, "actuator bound M must be positive");
  need(lc.gain_p >= 0.0 && lc.gain_d >= 0.0, "feedback gains must be nonnegative");
  need(lc.threshold() >= 0.0, "theta must be nonnegative");

  need(p.init.box > 0.0, "init box must be positive");
  need(p.init.min_sep >= 0.0, "init min_sep must be nonnegative");
  need(p.init.vel_spread >= 0.0, "init vel_spread must be nonnegative");

  const bool finite = std::isfinite(p.eps) && std::isfinite(p.delta) && std::isfinite(p.tau_max) &&
                      std::isfinite(p.dt) && std::isfinite(p.T);
  need(finite, "time and regularization parameters must be finite");
  if (finite && p.dt > 0.0 && p.tau_max >= 0.0) need(history_length(p.tau_max, p.dt) >= 1, "history buffer is empty");
  return r;
}

inline ValidationReport validate_tube(const TubeSpec& t) {
  ValidationReport r;
  if (!(t.eps_v > 0.0)) r.emplace_back("eps_v must be positive");
  if (!(t.delta_f > 0.0)) r.emplace_back("delta_f must be positive");
  if (!(t.rho > 0.0)) r.emplace_back("rho must be positive");
  if (!(t.alpha > 0.0 && t.alpha < 1.0)) r.emplace_back("alpha must lie in (0,1)");
  if (!(t.psi_power > 0.0)) r.emplace_back("psi_power must be positive");
  return r;
}

/// Reference point set: N points on a ceil(sqrt N) x ceil(sqrt N) planar grid,
/// row-major, with the given spacing. Extra dimensions are zero.
inline Points formation_reference(std::size_t N, double spacing, std::size_t d = 2) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(N))));
  Points ref(N, std::max<std::size_t>(d, 1));
  for (std::size_t i = 0; i < N; ++i) {
    ref[i][0] = spacing * static_cast<double>(i % side);
    if (d >= 2) ref[i][1] = spacing * static_cast<double>(i / side);
  }
  return ref;
}

inline FormationSpec build_formation_spec(std::size_t N, double spacing) {
  if (N < 2 || !(spacing > 0.0)) throw ConfigError("formation needs N >= 2 and positive spacing");
  const Points ref = formation_reference(N, spacing, 2);
  FormationSpec f{N, std::vector<double>(N * N, 0.0)};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double r = dist(ref[i], ref[j]);
      f.d_star[i * N + j] = r;
      f.d_star[j * N + i] = r;
    }
  return f;
}

}  // namespace swarm
