#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace swarm {

using Vec = std::vector<double>;

/// Dense N x d array of per-agent vectors (positions, velocities, controls),
/// stored row-major so each agent's coordinates are contiguous.
class Points {
 public:
  Points() = default;
  Points(std::size_t n, std::size_t d, double fill = 0.0) : n_(n), d_(d), data_(n * d, fill) {}

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }

  std::span<double> operator[](std::size_t i) {
    assert(i < n_);
    return {data_.data() + i * d_, d_};
  }
  std::span<const double> operator[](std::size_t i) const {
    assert(i < n_);
    return {data_.data() + i * d_, d_};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool operator==(const Points&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }
inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

// out = a - b
inline void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
}

inline Vec to_vec(std::span<const double> a) { return {a.begin(), a.end()}; }

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace swarm
