#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "swarm/comm.hpp"
#include "swarm/core.hpp"
#include "swarm/history.hpp"
#include "swarm/vec.hpp"

namespace swarm {

/// Thrown when the repulsive gradient is evaluated at (numerically) coincident agents.
class SingularInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kCollisionDistance = 1e-12;

struct ForceParams {
  double rep_strength = 1.0;
  double rep_power = 2.0;
  double form_strength = 0.0;
  double obs_strength = 0.0;
  Vec obs_center;

  static ForceParams from(const SimParams& p) {
    return {p.rep_strength, p.rep_power, p.form_strength, p.obs_strength, p.obs_center};
  }
};

/// U_rep(z) = C |z|^{-p}.
inline double u_rep(std::span<const double> z, const ForceParams& fp) {
  return fp.rep_strength * std::pow(norm(z), -fp.rep_power);
}

/// grad U_rep(z) = -p C |z|^{-p-2} z.
inline void grad_u_rep(std::span<const double> z, const ForceParams& fp, std::span<double> out) {
  const double r2 = norm2(z);
  const double r = std::sqrt(r2);
  if (!(r >= kCollisionDistance)) throw SingularInput("repulsive gradient at separation " + std::to_string(r));
  const double c = -fp.rep_power * fp.rep_strength * std::pow(r, -fp.rep_power - 2.0);
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = c * z[k];
}

inline Vec grad_u_rep(std::span<const double> z, const ForceParams& fp) {
  Vec out(z.size());
  grad_u_rep(z, fp, out);
  return out;
}

/// Quadratic cohesion U_form = (k/2)|z|^2.
inline void grad_u_form(std::span<const double> z, const ForceParams& fp, std::span<double> out) {
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = fp.form_strength * z[k];
}

inline Vec grad_u_form(std::span<const double> z, const ForceParams& fp) {
  Vec out(z.size());
  grad_u_form(z, fp, out);
  return out;
}

/// Quadratic confinement V_obs = (k/2)|x - x_c|^2.
inline void grad_v_obs(std::span<const double> x, const ForceParams& fp, std::span<double> out) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double c = k < fp.obs_center.size() ? fp.obs_center[k] : 0.0;
    out[k] = fp.obs_strength * (x[k] - c);
  }
}

inline Vec grad_v_obs(std::span<const double> x, const ForceParams& fp) {
  Vec out(x.size());
  grad_v_obs(x, fp, out);
  return out;
}

/// (1/N) sum_{j != i} grad U(x_i - x_j) with U = U_rep + U_form.
inline void pair_force(std::size_t i, const Points& x, const ForceParams& fp, std::span<double> out) {
  const std::size_t n = x.size();
  const std::size_t d = x.dim();
  std::fill(out.begin(), out.end(), 0.0);
  Vec zs(d), gs(d);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    sub(x[i], x[j], zs);
    if (fp.rep_strength != 0.0) {
      grad_u_rep(zs, fp, gs);
      for (std::size_t k = 0; k < d; ++k) out[k] += gs[k];
    }
    for (std::size_t k = 0; k < d; ++k) out[k] += fp.form_strength * zs[k];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= inv_n;
}

/// Full velocity drift of agent i given its control u_i (zero for followers).
inline void velocity_drift(std::size_t i, const SwarmState& s, const VelocityHistory& hist, const DelayMatrix& delays,
                           const CommWeights& w, std::span<const double> u_i, const SimParams& p,
                           const std::vector<bool>& is_leader, std::span<double> out) {
  const std::size_t d = s.x.dim();
  const ForceParams fp = ForceParams::from(p);
  Vec tmp(d);
  alignment(i, s.v, hist, delays, w, p.delta, out);
  pair_force(i, s.x, fp, tmp);
  for (std::size_t k = 0; k < d; ++k) out[k] -= tmp[k];
  grad_v_obs(s.x[i], fp, tmp);
  for (std::size_t k = 0; k < d; ++k) out[k] -= tmp[k];
  if (is_leader[i]) {
    const auto vi = s.v[i];
    for (std::size_t r = 0; r < d; ++r) {
      double bu = 0.0;
      for (std::size_t c = 0; c < d; ++c) bu += gain_entry(p.leaders, d, r, c) * u_i[c];
      out[r] += -p.leaders.b * (vi[r] - p.v_star[r]) + bu;
    }
  }
}

inline std::vector<bool> leader_mask(const SimParams& p) {
  std::vector<bool> m(p.N, false);
  for (auto id : p.leaders.leader_ids) m[id] = true;
  return m;
}

}  // namespace swarm
