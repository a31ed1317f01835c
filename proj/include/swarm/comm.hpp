#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "swarm/core.hpp"
#include "swarm/history.hpp"
#include "swarm/vec.hpp"

namespace swarm {

/// Logistic step s(u) = 1 / (1 + e^{-u}).
inline double logistic(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

/// Communication profile phi(s) = (1 + s^2)^{-beta}; bounded, decreasing on [0, inf).
inline double comm_profile(double s, double beta) { return std::pow(1.0 + s * s, -beta); }

/// Rank of j among the agents k != i ordered by distance to x_i (1 = nearest).
/// Equal distances are broken by agent index, lower index first.
inline std::size_t exact_rank(const Points& x, std::size_t i, std::size_t j) {
  const double dij = dist(x[i], x[j]);
  std::size_t rank = 1;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k == i || k == j) continue;
    const double dik = dist(x[i], x[k]);
    if (dik < dij || (dik == dij && k < j)) ++rank;
  }
  return rank;
}

/// r^eps_ij = 1 + sum_{k != i,j} s((|x_i - x_j| - |x_i - x_k|) / eps).
inline double smooth_rank(const Points& x, std::size_t i, std::size_t j, double eps) {
  const double dij = dist(x[i], x[j]);
  double r = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k == i || k == j) continue;
    r += logistic((dij - dist(x[i], x[k])) / eps);
  }
  return r;
}

struct Availability {
  AvailabilityMode mode = AvailabilityMode::Always;
  double range = 0.0;
};

/// chi_ij: exact indicator (regularized = false) or its logistic surrogate.
/// The rule is time-invariant; t is accepted for the general signature.
inline double availability(const Points& x, std::size_t i, std::size_t j, double /*t*/, double eps,
                           const Availability& a, bool regularized = true) {
  switch (a.mode) {
    case AvailabilityMode::Always:
      return 1.0;
    case AvailabilityMode::Range: {
      const double r = dist(x[i], x[j]);
      if (!regularized) return r <= a.range ? 1.0 : 0.0;
      return logistic((a.range - r) / eps);
    }
  }
  throw ConfigError("unknown availability mode");
}

/// Regularized pair weights a_ij and row sums eta_i for one configuration.
struct CommWeights {
  std::size_t N = 0;
  std::vector<double> a;
  std::vector<double> eta;

  double operator()(std::size_t i, std::size_t j) const { return a[i * N + j]; }
};

namespace detail {

// Beyond this many eps the logistic contribution is 1 up to rounding (|u| > 40
// gives e^{-40} ~ 4e-18 < ulp(1)/2), so only the window around d_ij needs exp().
inline constexpr double kSaturation = 40.0;

inline std::vector<double> pair_distances(const Points& x) {
  const std::size_t n = x.size();
  std::vector<double> D(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = dist(x[i], x[j]);
      D[i * n + j] = r;
      D[j * n + i] = r;
    }
  return D;
}

}  // namespace detail

inline CommWeights compute_weights(double t, const Points& x, const SimParams& p) {
  const std::size_t n = x.size();
  CommWeights w{n, std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0)};
  const auto D = detail::pair_distances(x);
  const Availability av{p.availability, p.comm_range};
  const double K = static_cast<double>(p.K);
  const double win = detail::kSaturation * p.eps;

  std::vector<double> sorted;
  sorted.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted.clear();
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) sorted.push_back(D[i * n + k]);
    std::sort(sorted.begin(), sorted.end());

    double eta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dij = D[i * n + j];
      double chi = 1.0;
      if (p.availability != AvailabilityMode::Always) {
        chi = availability(x, i, j, t, p.eps, av, true);
        if (chi == 0.0) continue;
      }
      // k with d_ik < d_ij - win contribute exactly 1; those above d_ij + win contribute ~0
      const auto lo = std::lower_bound(sorted.begin(), sorted.end(), dij - win);
      const auto hi = std::upper_bound(sorted.begin(), sorted.end(), dij + win);
      double rank = 1.0 + static_cast<double>(lo - sorted.begin());
      for (auto it = lo; it != hi; ++it) rank += logistic((dij - *it) / p.eps);
      // the window also contains d_ij itself (k = j), whose term is s(0)
      rank -= 0.5;
      const double a = chi * comm_profile(rank / K, p.phi_beta);
      w.a[i * n + j] = a;
      eta += a;
    }
    w.eta[i] = eta;
  }
  return w;
}

/// Normalized delayed alignment for agent i:
/// (eta_i + delta)^{-1} sum_j a_ij (v_j(t - tau_ij) - v_i(t)).
inline void alignment(std::size_t i, const Points& v_now, const VelocityHistory& hist, const DelayMatrix& delays,
                      const CommWeights& w, double delta, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t n = v_now.size();
  const auto vi = v_now[i];
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double a = w(i, j);
    if (a == 0.0) continue;
    const auto vj = delayed_velocity(hist, j, delays.lag_at(i, j));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += a * (vj[k] - vi[k]);
  }
  const double scale = 1.0 / (w.eta[i] + delta);
  for (auto& c : out) c *= scale;
}

inline Vec alignment(std::size_t i, const Points& v_now, const VelocityHistory& hist, const DelayMatrix& delays,
                     const CommWeights& w, double delta) {
  Vec out(v_now.dim());
  alignment(i, v_now, hist, delays, w, delta, out);
  return out;
}

}  // namespace swarm
