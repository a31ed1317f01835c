#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/core.hpp"
#include "swarm/rng.hpp"
#include "swarm/vec.hpp"

namespace swarm {

class HistoryUnderflow : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pair delays tau_ij (seconds) and their grid lags round(tau_ij/dt).
/// Row i holds the latencies with which agent i hears each j; diagonal unused.
struct DelayMatrix {
  std::size_t N = 0;
  std::vector<double> tau;
  std::vector<std::size_t> lag;

  double tau_at(std::size_t i, std::size_t j) const { return tau[i * N + j]; }
  std::size_t lag_at(std::size_t i, std::size_t j) const { return lag[i * N + j]; }

  static DelayMatrix zeros(std::size_t n) { return {n, std::vector<double>(n * n, 0.0), std::vector<std::size_t>(n * n, 0)}; }
};

inline std::size_t lag_for(double tau, double dt) { return static_cast<std::size_t>(std::llround(tau / dt)); }

/// Ring buffer of dt-spaced velocity snapshots covering [t - tau_max, t].
class VelocityHistory {
 public:
  VelocityHistory() = default;
  VelocityHistory(std::size_t length, const Points& v0, double t0, double dt)
      : snaps_(length, v0), stamps_(length), head_(0) {
    if (length == 0) throw std::invalid_argument("history length must be positive");
    // slot written k steps ago carries t0 - k*dt
    for (std::size_t k = 0; k < length; ++k) stamps_[(length - k) % length] = t0 - static_cast<double>(k) * dt;
  }

  std::size_t length() const { return snaps_.size(); }

  void push(double t, const Points& v) {
    head_ = (head_ + 1) % snaps_.size();
    snaps_[head_] = v;
    stamps_[head_] = t;
  }

  /// Snapshot written `lag` steps ago (lag 0 = most recent).
  const Points& at(std::size_t lag) const {
    if (lag >= snaps_.size())
      throw HistoryUnderflow("delayed lookup at lag " + std::to_string(lag) + " exceeds buffer of " +
                             std::to_string(snaps_.size()));
    return snaps_[(head_ + snaps_.size() - lag) % snaps_.size()];
  }

  double stamp(std::size_t lag) const {
    if (lag >= snaps_.size()) throw HistoryUnderflow("stamp lookup beyond buffer");
    return stamps_[(head_ + snaps_.size() - lag) % snaps_.size()];
  }

 private:
  std::vector<Points> snaps_;
  std::vector<double> stamps_;
  std::size_t head_ = 0;
};

inline std::span<const double> delayed_velocity(const VelocityHistory& hist, std::size_t j, std::size_t lag) {
  return hist.at(lag)[j];
}

/// Constant-velocity prehistory on [-tau_max, 0]: v(s) = v0, x(s) = x0 + v0 * s.
/// Positions on the prehistory are kept as displacements from x0 so the
/// compatibility relation can be checked without cancellation error.
struct InitialHistory {
  Points x0;
  Points v0;
  double tau_max = 0.0;

  void displacement(std::size_t i, double s, std::span<double> out) const {
    const auto vi = v0[i];
    for (std::size_t k = 0; k < vi.size(); ++k) out[k] = vi[k] * s;
  }

  void position(std::size_t i, double s, std::span<double> out) const {
    const auto xi = x0[i];
    const auto vi = v0[i];
    for (std::size_t k = 0; k < xi.size(); ++k) out[k] = xi[k] + vi[k] * s;
  }

  /// Exact integral of the prehistory velocity over [s, 0].
  void velocity_integral(std::size_t i, double s, std::span<double> out) const {
    const auto vi = v0[i];
    for (std::size_t k = 0; k < vi.size(); ++k) out[k] = vi[k] * (0.0 - s);
  }
};

/// max over agents and s in a uniform grid of [-tau_max, 0] of |x(s) - x(0) + int_s^0 v|.
inline double compat_residual(const InitialHistory& h, std::size_t grid = 64) {
  const std::size_t n = h.x0.size();
  const std::size_t d = h.x0.dim();
  Vec disp(d), integ(d);
  double worst = 0.0;
  for (std::size_t g = 0; g <= grid; ++g) {
    const double s = grid == 0 ? 0.0 : -h.tau_max * static_cast<double>(g) / static_cast<double>(grid);
    for (std::size_t i = 0; i < n; ++i) {
      h.displacement(i, s, disp);
      h.velocity_integral(i, s, integ);
      for (std::size_t k = 0; k < d; ++k) worst = std::max(worst, std::abs(disp[k] + integ[k]));
    }
  }
  return worst;
}

inline constexpr std::size_t kMaxInitAttempts = 100000;

/// Draws collision-free initial data and the matching prefilled velocity buffer.
inline std::pair<VelocityHistory, SwarmState> init_history(const SimParams& p, RunStreams& rng,
                                                            InitialHistory* prehistory = nullptr) {
  SwarmState s{0.0, Points(p.N, p.d), Points(p.N, p.d)};
  std::uniform_real_distribution<double> unif(0.0, p.init.box);
  auto& eng = rng.init.engine();
  const double sep2 = p.init.min_sep * p.init.min_sep;

  std::size_t attempts = 0;
  for (std::size_t i = 0; i < p.N; ++i) {
    for (;;) {
      if (++attempts > kMaxInitAttempts)
        throw InitError("rejection sampling exhausted: box " + std::to_string(p.init.box) + " cannot hold " +
                        std::to_string(p.N) + " agents at separation " + std::to_string(p.init.min_sep));
      auto xi = s.x[i];
      for (auto& c : xi) c = unif(eng);
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < p.d; ++k) {
          const double t = xi[k] - s.x[j][k];
          r2 += t * t;
        }
        ok = r2 >= sep2 && r2 > 0.0;
      }
      if (ok) break;
    }
  }
  for (std::size_t i = 0; i < p.N; ++i)
    for (std::size_t k = 0; k < p.d; ++k) s.v[i][k] = p.v_star[k] + p.init.vel_spread * rng.init();

  if (prehistory) *prehistory = InitialHistory{s.x, s.v, p.tau_max};
  VelocityHistory hist(history_length(p.tau_max, p.dt), s.v, 0.0, p.dt);
  return {std::move(hist), std::move(s)};
}

inline DelayMatrix sample_delays(const SimParams& p, RunStreams& rng) {
  DelayMatrix D = DelayMatrix::zeros(p.N);
  std::uniform_real_distribution<double> unif(0.0, p.tau_max);
  auto& eng = rng.delays.engine();
  for (std::size_t i = 0; i < p.N; ++i)
    for (std::size_t j = 0; j < p.N; ++j) {
      if (i == j) continue;
      const double tau = p.tau_max > 0.0 ? unif(eng) : 0.0;
      D.tau[i * p.N + j] = tau;
      D.lag[i * p.N + j] = lag_for(tau, p.dt);
    }
  return D;
}

}  // namespace swarm
