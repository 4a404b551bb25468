#pragma once

#include <cstdint>

namespace sns {

/// splitmix64 step; used for auxiliary deterministic draws (branch
/// sampling, per-step ordering bits), never for the driving noise.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Uniform in [0,1) from one splitmix64 step.
inline double splitmix_uniform(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1p-53;
}

}  // namespace sns
