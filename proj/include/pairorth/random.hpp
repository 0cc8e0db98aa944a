#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pairorth {

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// SplitMix64 generator, used to expand seeds.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  private:
    std::uint64_t state_;
};

/// Independent random streams drawn from one user seed.
enum class Stream : std::uint64_t {
    generator = 1,
    replicate = 2,
    orth_pairs = 3,
    kaczmarz_rows = 4,
    certification = 5,
};

/// Seed for element `index` of stream `stream` under `base`. Distinct
/// (stream, index) pairs give statistically unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index) noexcept {
    const std::uint64_t root = mix64(base ^ mix64(static_cast<std::uint64_t>(stream) * 0xd1342543de82ef95ull));
    return mix64(root + (index + 1) * 0x9e3779b97f4a7c15ull);
}

/// xoshiro256** 1.0, seeded through SplitMix64.
class Xoshiro256 {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept;

    result_type operator()() noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  private:
    std::array<std::uint64_t, 4> s_;
};

// Distributions are written out here rather than taken from <random> so that
// sequences are identical across standard library implementations.

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Xoshiro256& rng) noexcept;

/// Uniform integer in [0, bound), bound > 0, without modulo bias.
std::uint64_t uniform_index(Xoshiro256& rng, std::uint64_t bound) noexcept;

/// Standard normal deviate (Marsaglia polar method).
double standard_normal(Xoshiro256& rng) noexcept;

}  // namespace pairorth
