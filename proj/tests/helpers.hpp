#pragma once

#include <cstdint>

#include "pidlrsc/pidlrsc.hpp"

namespace testutil {

inline pidlrsc::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double sd = 1.0) {
    pidlrsc::Rng rng(seed);
    pidlrsc::Matrix m(rows, cols);
    for (double& x : m.values()) x = pidlrsc::normal(rng, 0.0, sd);
    return m;
}

inline pidlrsc::Vector random_vector(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    const pidlrsc::Matrix m = random_matrix(1, n, seed, sd);
    return {m.values().begin(), m.values().end()};
}

}  // namespace testutil
