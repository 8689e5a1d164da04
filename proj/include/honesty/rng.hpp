#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace honesty::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the index-th substream of a master seed.
inline std::uint64_t substream(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Seed of a named substream (FNV-1a of the label mixed into the master seed).
inline std::uint64_t substream(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return splitmix64(master ^ splitmix64(h));
}

using Engine = std::mt19937_64;

}  // namespace honesty::rng
