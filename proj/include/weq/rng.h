#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace weq {

// Distribution helpers with a fixed algorithm, so seeded output does not depend
// on the standard library implementation.

inline std::uint64_t uniformInt(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0)
        return rng();
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return lo + x % span;
}

inline double uniformReal(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffleInPlace(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniformInt(rng, 0, i - 1);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace weq
