#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace excursion {

/// Recorded in FieldSample::model_tag.
inline constexpr std::string_view kRngName = "mt19937_64+splitmix64";

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from (seed, index). Used for
/// per-replicate seeds and for the K component fields of a chi-square draw.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0xD1B54A32D192ED03ULL));
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(splitmix64(seed)),
                      static_cast<std::uint32_t>(splitmix64(seed) >> 32)};
    return Engine(seq);
}

}  // namespace excursion
