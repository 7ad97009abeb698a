#pragma once

#include <cstdint>
#include <random>

namespace sbmsel {

// splitmix64, used only to derive substream seeds from a root seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Substream splitting rule: stream i of a root seed is
// splitmix64(root ^ splitmix64(i + 1)). Every replication, restart and
// sweep cell draws its own substream so runs are reproducible regardless
// of execution order.
inline std::uint64_t substream_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(root ^ splitmix64(stream + 1));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t root, std::uint64_t stream) {
    return Rng(substream_seed(root, stream));
}

} // namespace sbmsel
