#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace ppmf::rng {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Independent engine for a named consumer ("split", "folds", "synth", ...)
/// derived from the run seed, so each component can be replayed alone.
inline Engine stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
    return Engine(splitmix64(seed ^ splitmix64(fnv1a(name) + index)));
}

/// Unbiased draw from [0, bound) by rejection; portable across standard libraries.
inline std::uint64_t below(Engine& eng, std::uint64_t bound) {
    const std::uint64_t limit = Engine::max() - Engine::max() % bound;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % bound;
}

inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(below(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace ppmf::rng
