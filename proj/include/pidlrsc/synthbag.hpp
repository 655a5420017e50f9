#pragma once

// Synthetic bags: a sparse tumor component whose mean moves with the class,
// a dominant non-tumor component with a weak class signal, and a
// class-independent background component.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pidlrsc/linalg.hpp"
#include "pidlrsc/pid.hpp"
#include "pidlrsc/rng.hpp"

namespace pidlrsc {

enum class Role { tumor = 0, nontumor = 1, background = 2 };

inline std::string_view to_string(Role r) {
    switch (r) {
        case Role::tumor: return "tumor";
        case Role::nontumor: return "nontumor";
        case Role::background: return "background";
    }
    return "?";
}

struct Bag {
    Matrix features;          // m × n_in
    std::size_t label = 0;
    std::vector<Role> roles;  // empty when unknown
    std::uint64_t bag_id = 0;

    std::size_t size() const noexcept { return features.rows(); }
};

struct SynthConfig {
    std::size_t classes = 3;
    std::size_t n_in = 32;
    std::size_t m_min = 64;
    std::size_t m_max = 256;
    double rho = 0.05;
    double delta = 0.4;
    double spread = 0.05;
    double separation = 1.0;
    std::size_t prototypes = 32;
    std::uint64_t seed = 0;

    void validate() const {
        if (classes < 2) throw DimensionError("synth: need at least 2 classes");
        if (n_in < 4) throw DimensionError("synth: n_in must be at least 4");
        if (m_min < 3 || m_max < m_min) throw DimensionError("synth: need 3 <= m_min <= m_max");
        if (!(rho > 0.0 && rho < 1.0)) throw NumericalError("synth: rho must lie in (0, 1)");
        if (!(delta >= 0.0)) throw NumericalError("synth: delta must be non-negative");
        if (!(spread > 0.0)) throw NumericalError("synth: spread must be positive");
        if (prototypes < 1) throw DimensionError("synth: need at least one prototype");
    }
};

/// Component means and the class-shift direction.
struct Anchors {
    Vector tumor;
    Vector nontumor;
    Vector background;
    Vector direction;  // unit vector u
};

inline Anchors make_anchors(const SynthConfig& cfg) {
    Anchors a{Vector(cfg.n_in, 0.0), Vector(cfg.n_in, 0.0), Vector(cfg.n_in, 0.0), Vector(cfg.n_in, 0.0)};
    a.tumor[0] = cfg.separation;
    a.nontumor[1] = cfg.separation;
    a.background[2] = cfg.separation;
    a.direction[3] = 1.0;
    return a;
}

struct RoleCounts {
    std::size_t tumor = 0;
    std::size_t nontumor = 0;
    std::size_t background = 0;
};

/// ceil(rho·m) tumor, 70% of the remainder non-tumor (floored), rest background.
inline RoleCounts role_counts(std::size_t m, double rho) {
    RoleCounts c;
    c.tumor = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(m) - 1e-9));
    if (c.tumor > m) c.tumor = m;
    const std::size_t rest = m - c.tumor;
    c.nontumor = (7 * rest) / 10;
    c.background = rest - c.nontumor;
    return c;
}

/// Bag with a given size and label; the generator's entry point below draws both.
inline Bag generate_bag_with(const SynthConfig& cfg, std::uint64_t bag_id, std::size_t m, std::size_t label,
                             Rng& rng) {
    const Anchors anchors = make_anchors(cfg);
    const RoleCounts counts = role_counts(m, cfg.rho);
    const double y = static_cast<double>(label);

    Bag bag;
    bag.bag_id = bag_id;
    bag.label = label;
    bag.features = Matrix(m, cfg.n_in);
    bag.roles.reserve(m);

    std::size_t row = 0;
    auto emit = [&](std::size_t n, Role role, const Vector& mean, double shift, double sd) {
        for (std::size_t i = 0; i < n; ++i, ++row) {
            auto r = bag.features.row(row);
            for (std::size_t j = 0; j < cfg.n_in; ++j) r[j] = normal(rng, mean[j] + shift * anchors.direction[j], sd);
            bag.roles.push_back(role);
        }
    };
    emit(counts.tumor, Role::tumor, anchors.tumor, y * cfg.delta, cfg.spread);
    emit(counts.nontumor, Role::nontumor, anchors.nontumor, y * cfg.delta / 4.0, cfg.spread);
    emit(counts.background, Role::background, anchors.background, 0.0, 2.0 * cfg.spread);

    // Interleave roles so instance order carries no information.
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    shuffle(std::span<std::size_t>(perm), rng);
    Matrix shuffled(m, cfg.n_in);
    std::vector<Role> roles(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto src = bag.features.row(perm[i]);
        std::copy(src.begin(), src.end(), shuffled.row(i).begin());
        roles[i] = bag.roles[perm[i]];
    }
    bag.features = std::move(shuffled);
    bag.roles = std::move(roles);
    return bag;
}

inline Bag generate_bag(const SynthConfig& cfg, std::uint64_t bag_id) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, {stream::bag, bag_id}));
    const std::size_t m = cfg.m_min + uniform_index(rng, cfg.m_max - cfg.m_min + 1);
    const std::size_t label = uniform_index(rng, cfg.classes);
    return generate_bag_with(cfg, bag_id, m, label, rng);
}

/// Bags with ids first_id, first_id + 1, ...
inline std::vector<Bag> generate_dataset(const SynthConfig& cfg, std::size_t count, std::uint64_t first_id = 0) {
    if (count == 0) throw DimensionError("generate_dataset: count must be at least 1");
    std::vector<Bag> bags;
    bags.reserve(count);
    for (std::size_t i = 0; i < count; ++i) bags.push_back(generate_bag(cfg, first_id + i));
    return bags;
}

/// Draws from the grade-neutral tumor component N(mu_T, spread²·I).
inline PrototypeSet sample_prototypes(const SynthConfig& cfg) {
    cfg.validate();
    const Anchors anchors = make_anchors(cfg);
    Rng rng(derive_seed(cfg.seed, {stream::prototypes}));
    PrototypeSet set;
    set.source = PrototypeSet::Source::synthetic;
    set.features = Matrix(cfg.prototypes, cfg.n_in);
    for (std::size_t i = 0; i < cfg.prototypes; ++i)
        for (std::size_t j = 0; j < cfg.n_in; ++j) set.features(i, j) = normal(rng, anchors.tumor[j], cfg.spread);
    return set;
}

}  // namespace pidlrsc
