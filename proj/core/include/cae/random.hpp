#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cae {

// Seeded generator with platform-independent distributions.
//
// std::uniform_*_distribution and std::shuffle are implementation-defined, so
// every derived quantity here is computed directly from mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller (no cached spare, so the stream is stateless
  // with respect to call interleaving).
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Sub-seed derivation: fixed offsets from a master seed.
namespace seeds {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kInit = 2;
inline constexpr std::uint64_t kTrain = 3;
inline constexpr std::uint64_t kCluster = 4;
inline constexpr std::uint64_t kSynthetic = 5;

inline std::uint64_t derive(std::uint64_t master, std::uint64_t offset) {
  return master * 0x9E3779B97F4A7C15ULL + offset;
}
}  // namespace seeds

}  // namespace cae
