#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace swarm {

/// SplitMix64 finalizer; used to derive well-separated seeds from structured inputs.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Gaussian sampler bound to its own engine, so streams never interleave.
class NormalStream {
 public:
  NormalStream() = default;
  explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

  double operator()() { return dist_(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// Independent substreams of one realization, all derived from the run seed:
/// initial data, delay draws, common noise, and one idiosyncratic stream per agent.
struct RunStreams {
  std::uint64_t seed = 0;
  NormalStream init;
  NormalStream delays;
  NormalStream common;
  std::vector<NormalStream> idio;

  RunStreams(std::uint64_t run_seed, std::size_t n_agents)
      : seed(run_seed), init(mix_seed(run_seed, 1)), delays(mix_seed(run_seed, 2)), common(mix_seed(run_seed, 3)) {
    idio.reserve(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i) idio.emplace_back(mix_seed(run_seed, 1000 + i));
  }
};

inline std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
  return mix_seed(base_seed, run_index);
}

}  // namespace swarm
