#pragma once

// Deterministic random number generation with per-replication substreams.
//
// Splitting scheme (the determinism contract depends on it, so it is spelled
// out): a SplitMix64 counter sequence keyed by the master seed,
//     out(j) = mix64(seed + (j + 1) * 0x9E3779B97F4A7C15),
// provides the four 64-bit state words of an independent xoshiro256++
// generator for each replication i via j = 4i .. 4i+3. Replication i's
// stream therefore depends only on (seed, i), never on scheduling, which
// makes results bit-identical for any worker count or partitioning.

#include <cstdint>

namespace driftcorrect {

namespace detail {

// SplitMix64 finalizer (Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// j-th output of the SplitMix64 sequence keyed by seed (random access).
inline std::uint64_t splitmix_at(std::uint64_t seed, std::uint64_t j) {
    return mix64(seed + (j + 1) * kGolden);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ generator.
class Xoshiro256pp {
  public:
    // Single stream keyed by seed (used where no substreams are needed).
    explicit Xoshiro256pp(std::uint64_t seed) : Xoshiro256pp(seed, 0) {}

    // Substream i of the family keyed by seed; see the header comment.
    Xoshiro256pp(std::uint64_t seed, std::uint64_t i) {
        for (int t = 0; t < 4; ++t)
            s_[t] = detail::splitmix_at(seed, 4 * i + static_cast<std::uint64_t>(t));
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = detail::kGolden;  // forbidden state
    }

    std::uint64_t next() {
        const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t s_[4];
};

}  // namespace driftcorrect
