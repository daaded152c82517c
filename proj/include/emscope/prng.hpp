/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_PRNG_HPP
#define EMSCOPE_PRNG_HPP

#include <cmath>
#include <cstdint>

namespace emscope {

// xorshift64* has a fixed point at state 0; zero seeds are remapped to the
// 64-bit golden-ratio constant so every seed yields a usable stream.
inline constexpr std::uint64_t kSeedRemap = 0x9E3779B97F4A7C15ULL;

// Deterministic 64-bit generator used everywhere randomness is needed
// (synthesis noise, CDMA chips, k-means++ draws). Keeping one fixed,
// integer-only core makes ensembles and fits bit-reproducible across runs.
class Prng {
  public:
    explicit Prng(std::uint64_t seed) : state_(seed ? seed : kSeedRemap) {}

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 2685821657736338717ULL;
    }

    // Top 53 bits of the output, mapped to [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Box-Muller, one pair per two uniform draws; the second value is cached.
    // 1 - u keeps the log argument in (0, 1].
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Per-trace seed derivation: seed XOR (index * golden ratio). Zero results
// are remapped by the Prng constructor.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ (index * kSeedRemap);
}

// splitmix64 finalizer; used to derive independent sub-seeds for parallel
// work items so thread scheduling cannot change any result.
inline std::uint64_t hash64(std::uint64_t x) {
    x += kSeedRemap;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) {
    return hash64(a ^ hash64(b));
}

}  // namespace emscope

#endif
