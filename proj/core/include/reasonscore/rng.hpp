#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace reasonscore {

/// 64-bit FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// SplitMix64. This is the one generator used everywhere randomness must be
/// bit-reproducible across platforms (hash embeddings, perturbations,
/// permutation tests); the update sequence is part of the output contract
/// and must not change.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), rejection-sampled (no modulo bias).
  std::uint64_t next_below(std::uint64_t n) noexcept {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t v = next();
      if (v >= threshold) return v % n;
    }
  }

 private:
  std::uint64_t state_;
};

/// Stable seed derivation for per-item streams (chains, replicates).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view id) noexcept {
  return SplitMix64(base ^ fnv1a64(id)).next();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return SplitMix64(base ^ (0xD1B54A32D192ED03ull + index * 0x9E3779B97F4A7C15ull)).next();
}

/// Fisher-Yates with SplitMix64; deterministic across platforms, unlike
/// std::shuffle.
template <typename T>
void shuffle(std::vector<T>& values, SplitMix64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

inline std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  shuffle(perm, rng);
  return perm;
}

}  // namespace reasonscore
