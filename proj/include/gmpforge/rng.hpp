#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gmpforge {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Good avalanche behaviour, cheap, and stable across
// platforms; all seed derivation goes through it.
inline std::uint64_t mix_bits(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent seed from a base seed and a path of indices, e.g.
// (tag, run, generation, individual). Evaluation order and thread scheduling
// can then never change which stream an evaluation consumes.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix_bits(base);
    for (std::uint64_t v : path) s = mix_bits(s ^ mix_bits(v));
    return s;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(base, path));
}

// Stream tags keeping the seed spaces of the different phases disjoint.
inline constexpr std::uint64_t seed_tag_init = 0xA1;
inline constexpr std::uint64_t seed_tag_eval = 0xA2;
inline constexpr std::uint64_t seed_tag_breed = 0xA3;
inline constexpr std::uint64_t seed_tag_generalise = 0xA4;

// Uniform draw from [0, n). Modulo bias is negligible for the small n used
// here and keeps the draw portable across standard libraries.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

// Uniform draw from [lo, hi], both inclusive.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline bool coin(Rng& rng) { return (rng() & 1u) != 0; }

// Uniform draw from [0, 1).
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace gmpforge
