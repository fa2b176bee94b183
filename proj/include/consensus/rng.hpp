#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace consensus {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent stream keyed by (seed, keys...). Same key, same stream, no
/// matter which thread asks or in what order.
inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(seed);
    for (auto k : keys) h = mix64(h ^ mix64(k));
    return Rng(h);
}

namespace stream_tag {
inline constexpr std::uint64_t sample_a = 0xA;
inline constexpr std::uint64_t sample_b = 0xB;
inline constexpr std::uint64_t bootstrap = 0xB007;
inline constexpr std::uint64_t data = 0xDA7A;
}  // namespace stream_tag

}  // namespace consensus
