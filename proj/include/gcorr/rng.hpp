#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace gcorr {

// Stream tags used to derive decorrelated substreams from one master seed.
// Latent draws, graph-1 edges and graph-2 edges never share a stream, so
// regenerating one side of a pair leaves the other side bit-identical.
inline constexpr std::uint64_t kLatentStream = 0x11;
inline constexpr std::uint64_t kGraphOneStream = 0x22;
inline constexpr std::uint64_t kGraphTwoStream = 0x33;
inline constexpr std::uint64_t kPermutationStream = 0x44;
inline constexpr std::uint64_t kStudyStream = 0x55;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Hashes (master, tag) into a fresh seed for an independent stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  std::uint64_t state = master ^ (0xbf58476d1ce4e5b9ull * (tag + 1));
  detail::splitmix64(state);
  return detail::splitmix64(state);
}

/// Deterministic random stream. The engine is std::mt19937_64 (its output
/// sequence is pinned by the standard); all variate transforms are done here
/// so results do not depend on the standard library's distribution code.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; uses exactly two uniforms per call.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

  /// Uniform random permutation of {0, ..., n-1} (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::swap(perm[i - 1], perm[below(i)]);
    }
    return perm;
  }

 private:
  std::mt19937_64 engine_;
};

inline RandomStream substream(std::uint64_t master, std::uint64_t tag) {
  return RandomStream(derive_seed(master, tag));
}

}  // namespace gcorr
