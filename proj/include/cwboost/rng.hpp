#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace cwboost {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Splittable stream keys: each fit / replication / purpose gets its own
// seed derived from the run seed, so tasks are reproducible in isolation
// and independent of scheduling.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t state = 0x6a09e667f3bcc908ULL;
    for (std::uint64_t k : keys) {
        state ^= splitmix64(state) ^ k;
        state = splitmix64(state);
    }
    return splitmix64(state);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    return fnv1a64(std::string_view(static_cast<const char*>(data), size));
}

inline Rng make_rng(std::uint64_t seed) {
    return Rng(seed);
}

}  // namespace cwboost
