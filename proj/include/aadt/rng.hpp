#pragma once

#include <cstdint>
#include <random>

namespace aadt {

// splitmix64 finalizer; used to derive independent stream seeds from a root
// seed so parallel and serial execution agree bit-for-bit.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a) {
    return mix64(mix64(root) ^ mix64(a));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(root, a), b);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t root, std::uint64_t stream) {
    return Rng(derive_seed(root, stream));
}

}  // namespace aadt
