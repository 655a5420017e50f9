#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace pidlrsc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for (base seed, stream tag, ids...).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

// Stream tags.
namespace stream {
inline constexpr std::uint64_t bag = 1;
inline constexpr std::uint64_t prototypes = 2;
inline constexpr std::uint64_t metric_init = 3;
inline constexpr std::uint64_t params_init = 4;
inline constexpr std::uint64_t shuffle = 5;
inline constexpr std::uint64_t frequencies = 6;
inline constexpr std::uint64_t clustering = 7;
inline constexpr std::uint64_t split = 8;
inline constexpr std::uint64_t eval_frequencies = 9;
inline constexpr std::uint64_t gradcheck = 10;
}  // namespace stream

/// Uniform in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform index in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

inline double normal(Rng& rng, double mean, double sd) {
    std::normal_distribution<double> dist(mean, sd);
    return dist(rng);
}

/// Fisher-Yates shuffle driven by `uniform_index`.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace pidlrsc
