#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace exacktr {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a salt. Streams for
// different concerns (action sampling, expert batches, Fisher sampling, env
// resets) never share generator state, so adding or removing one consumer
// cannot shift the draws of another.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(splitmix64(base) ^ splitmix64(salt ^ 0xD1B54A32D192ED03ull));
}

// Stream salts used across the trainer and harness.
namespace stream {
constexpr std::uint64_t kEnv = 1;
constexpr std::uint64_t kActions = 2;
constexpr std::uint64_t kExpertBatch = 3;
constexpr std::uint64_t kFisher = 4;
constexpr std::uint64_t kEval = 5;
constexpr std::uint64_t kInit = 6;
}  // namespace stream

// Deterministic RNG. All sampling is built on raw mt19937_64 output (which
// the standard pins bit-for-bit), never on std distributions, so results are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 bits of entropy.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling avoids modulo bias.
  int uniform_int(int n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  // Standard normal via Box-Muller (cosine branch only; two uniforms per draw).
  double gaussian() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Index sampled from a probability vector by CDF inversion.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace exacktr
