#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace pidlrsc;

namespace {

double pair_count_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& pos) {
    double hits = 0, pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!pos[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (pos[j]) continue;
            hits += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            pairs += 1;
        }
    }
    return hits / pairs;
}

}  // namespace

TEST(Accuracy, Basic) {
    const std::vector<std::size_t> p{0, 1, 2, 2}, y{0, 1, 1, 2};
    EXPECT_DOUBLE_EQ(accuracy(p, y), 0.75);
    EXPECT_THROW(accuracy(std::span<const std::size_t>{}, std::span<const std::size_t>{}), EmptySetError);
}

TEST(Auc, MatchesPairCounting) {
    Rng rng(1);
    std::vector<double> s(60);
    std::vector<std::uint8_t> pos(60);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::round(normal(rng, 0, 1) * 4) / 4;  // forces ties
        pos[i] = uniform01(rng) < 0.4;
    }
    EXPECT_NEAR(detail::rank_auc(s, pos), pair_count_auc(s, pos), 1e-12);
}

TEST(Auc, AllTiedIsHalf) {
    const std::vector<double> s(10, 0.3);
    const std::vector<std::uint8_t> pos{1, 0, 1, 0, 1, 0, 0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(detail::rank_auc(s, pos), 0.5);
}

TEST(Auc, InvariantToMonotoneTransform) {
    Rng rng(2);
    std::vector<double> s(40), t(40);
    std::vector<std::uint8_t> pos(40);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = normal(rng, 0, 1);
        t[i] = std::exp(3 * s[i]) + 1;
        pos[i] = i % 3 == 0;
    }
    EXPECT_DOUBLE_EQ(detail::rank_auc(s, pos), detail::rank_auc(t, pos));
}

TEST(MacroAuc, PerfectAndValidation) {
    const Matrix probs{{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}, {0.7, 0.2, 0.1}};
    const std::vector<std::size_t> y{0, 1, 2, 0};
    EXPECT_DOUBLE_EQ(macro_auc(probs, y), 1.0);
    const Matrix bad{{0.5, 0.4, 0.4}, {0.1, 0.8, 0.1}};
    EXPECT_THROW(macro_auc(bad, std::vector<std::size_t>{0, 1}), NumericalError);
    const Matrix one{{0.5, 0.5}, {0.6, 0.4}};
    EXPECT_THROW(macro_auc(one, std::vector<std::size_t>{0, 0}), UndefinedMetricError);
}

TEST(EtaSquared, SmallOracle) {
    const std::vector<double> v{1, 2, 2, 3};
    const std::vector<std::size_t> y{0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(eta_squared_1d(v, y), 0.5);
    EXPECT_DOUBLE_EQ(eta_squared_1d(std::vector<double>{4, 4, 4}, std::vector<std::size_t>{0, 1, 1}), 0.0);
    EXPECT_THROW(eta_squared_1d(std::vector<double>{1, 2}, std::vector<std::size_t>{0, 0}), UndefinedMetricError);
}

TEST(EtaSquared, SeparatedClassesNearOne) {
    Rng rng(3);
    Matrix f(90, 4);
    std::vector<std::size_t> y(90);
    for (std::size_t i = 0; i < 90; ++i) {
        y[i] = i % 3;
        for (std::size_t j = 0; j < 4; ++j) f(i, j) = normal(rng, j == 0 ? 5.0 * y[i] : 0.0, 0.1);
    }
    EXPECT_GT(eta_squared(f, y), 0.99);
}

TEST(EtaSquared, RandomLabelsNearZero) {
    Rng rng(4);
    std::vector<double> v(3000);
    std::vector<std::size_t> y(3000);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = normal(rng, 0, 1);
        y[i] = uniform_index(rng, 3);
    }
    EXPECT_LT(eta_squared_1d(v, y), 0.01);
}

TEST(Disentangle, AnchoredAndPermutationScores) {
    using S = Semantic;
    using R = Role;
    const std::vector<std::vector<S>> maps{{S::TIs, S::NTIs, S::BGIs, S::NTIs}, {S::NTIs, S::TIs, S::BGIs}};
    const std::vector<std::vector<R>> roles{{R::tumor, R::nontumor, R::background, R::nontumor},
                                            {R::tumor, R::nontumor, R::background}};
    const DisentangleScore s = disentangle_accuracy(maps, roles);
    EXPECT_DOUBLE_EQ(s.anchored, 5.0 / 7.0);
    EXPECT_DOUBLE_EQ(s.best_permutation, 1.0);
    EXPECT_DOUBLE_EQ(s.tumor_anchored, 0.5);
    EXPECT_EQ(s.tumor_instances, 2u);
    EXPECT_LE(s.anchored, s.best_permutation);
}

TEST(Disentangle, MissingRoles) {
    const std::vector<std::vector<Semantic>> maps{{Semantic::TIs}};
    const std::vector<std::vector<Role>> roles{{}};
    EXPECT_THROW(disentangle_accuracy(maps, roles), RolesUnavailableError);
}

TEST(Split, DisjointCoverAndDeterministic) {
    const auto [tr, te] = split_indices(100, 5);
    EXPECT_EQ(tr.size(), 70u);
    EXPECT_EQ(te.size(), 30u);
    std::vector<std::size_t> all = tr;
    all.insert(all.end(), te.begin(), te.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(all[i], i);
    EXPECT_EQ(split_indices(100, 5).first, tr);
    EXPECT_NE(split_indices(100, 6).first, tr);
}

TEST(Median, OddEvenEmpty) {
    EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
    EXPECT_TRUE(std::isnan(median({})));
}

TEST(Evaluate, ReportsAllMetricsForFullModel) {
    SynthConfig synth;
    synth.n_in = 8;
    synth.m_min = synth.m_max = 30;
    synth.rho = 0.2;
    synth.prototypes = 6;
    const auto bags = generate_dataset(synth, 12);
    const PrototypeSet protos = sample_prototypes(synth);
    TrainConfig cfg;
    cfg.frequencies = 16;
    const EvalReport r = evaluate(bags, init_params(8, 3, cfg), protos, cfg);
    EXPECT_EQ(r.test_bags, 12u);
    EXPECT_EQ(r.predicted.size(), 12u);
    EXPECT_TRUE(r.auc.has_value());
    EXPECT_TRUE(r.eta2.has_value());
    ASSERT_TRUE(r.disentangle.has_value());
    EXPECT_EQ(r.disentangle->instances, 360u);
    EXPECT_EQ(r.projection.size(), 12u);
    EXPECT_EQ(evaluate(bags, init_params(8, 3, cfg), protos, cfg).predicted, r.predicted);
}

TEST(Ablation, RowsForEveryVariantAndLookup) {
    SynthConfig synth;
    synth.n_in = 8;
    synth.m_min = synth.m_max = 20;
    synth.rho = 0.2;
    synth.prototypes = 4;
    const auto bags = generate_dataset(synth, 10);
    TrainConfig cfg;
    cfg.frequencies = 8;
    cfg.epochs = 1;
    const std::vector<std::uint64_t> seeds{0};
    std::size_t reports = 0;
    const AblationTable t = run_ablation(bags, sample_prototypes(synth), cfg, 3, seeds,
                                         [&](const EvalReport&) { ++reports; });
    EXPECT_EQ(t.rows.size(), 5u);
    EXPECT_EQ(reports, 5u);
    EXPECT_EQ(t.row("full_mmd").runs.at(0).metric, "mmd");
    EXPECT_THROW(t.row("nope"), NotFoundError);
}
