#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace pidlrsc;

namespace {

SubspacePartition partition_of(const Matrix& x, std::vector<std::size_t> assignments) {
    return partition_from_assignments(x, assignments, 3);
}

}  // namespace

TEST(Pool, MeanOfAssignedRows) {
    const Matrix x{{1, 2}, {3, 4}, {10, 10}, {5, 6}};
    const std::vector<std::size_t> a{0, 0, 1, 0};
    const Vector p = pool_subspace(x, a, 0);
    EXPECT_DOUBLE_EQ(p[0], 3.0);
    EXPECT_DOUBLE_EQ(p[1], 4.0);
    EXPECT_THROW(pool_subspace(x, a, 2), EmptyClusterError);
}

TEST(Rank, AscendingWithLowerIndexOnTies) {
    EXPECT_EQ(rank_by_distance({0.5, 0.1, 0.9}), (RankOrder{1, 0, 2}));
    EXPECT_EQ(rank_by_distance({0.3, 0.3, 0.9}), (RankOrder{0, 1, 2}));
    EXPECT_EQ(rank_by_distance({0.9, 0.3, 0.3}), (RankOrder{1, 2, 0}));
}

TEST(Refine, WeightsFromMaxNormalization) {
    DisentangledBag bag;
    bag.distances = {0.0, 1.0, 2.0};
    bag.order = rank_by_distance(bag.distances);
    bag.pooled = {Vector{1, 0}, Vector{0, 1}, Vector{1, 1}};
    bag.prototype_mean = Vector{10, 20};
    const Vector z = refine(bag, 1e-8);
    EXPECT_DOUBLE_EQ(bag.weights[0], 1.0);
    EXPECT_NEAR(bag.weights[1], 0.5, 1e-8);
    EXPECT_NEAR(bag.weights[2], 0.0, 1e-8);
    EXPECT_NEAR(z[0], 10.0 + 1.0 + 0.0, 1e-7);
    EXPECT_NEAR(z[1], 20.0 + 0.5 + 0.0, 1e-7);
    const auto sw = bag.semantic_weights();
    EXPECT_GE(sw[0], sw[1]);
    EXPECT_GE(sw[1], sw[2]);
    EXPECT_EQ(sw[3], 1.0);
}

TEST(Refine, SumNormalization) {
    DisentangledBag bag;
    bag.distances = {1.0, 1.0, 2.0};
    bag.order = rank_by_distance(bag.distances);
    bag.pooled = {Vector{0}, Vector{0}, Vector{0}};
    bag.prototype_mean = Vector{0};
    refine(bag, 1e-12, Normalization::sum);
    EXPECT_NEAR(bag.weights[0], 0.75, 1e-10);
    EXPECT_NEAR(bag.weights[2], 0.5, 1e-10);
}

TEST(Refine, RejectsNonPositiveEpsilon) {
    DisentangledBag bag;
    bag.pooled = {Vector{0}, Vector{0}, Vector{0}};
    bag.prototype_mean = Vector{0};
    EXPECT_THROW(refine(bag, 0.0), NumericalError);
}

TEST(Disentangle, ClusterNearPrototypesIsTumor) {
    // Cluster 1 sits on the prototypes, cluster 2 is farthest.
    const Matrix x{{0, 0}, {0.1, 0}, {1, 1}, {1.1, 1}, {3, 3}, {3.1, 3}};
    const SubspacePartition p = partition_of(x, {0, 0, 1, 1, 2, 2});
    PrototypeSet protos;
    protos.features = Matrix{{1, 1}, {1.1, 1.05}};
    auto euclid = [](const Matrix& a, const Matrix& b) {
        const Vector ma = column_mean(a), mb = column_mean(b);
        double s = 0;
        for (std::size_t j = 0; j < ma.size(); ++j) s += (ma[j] - mb[j]) * (ma[j] - mb[j]);
        return std::sqrt(s);
    };
    const DisentangledBag d = disentangle_with(p, x, protos, euclid);
    EXPECT_EQ(d.semantic_of_cluster[1], Semantic::TIs);
    EXPECT_EQ(d.semantic_of_cluster[0], Semantic::NTIs);
    EXPECT_EQ(d.semantic_of_cluster[2], Semantic::BGIs);
    EXPECT_EQ(d.instance_map, (std::vector<Semantic>{Semantic::NTIs, Semantic::NTIs, Semantic::TIs, Semantic::TIs,
                                                      Semantic::BGIs, Semantic::BGIs}));
    EXPECT_FALSE(d.degenerate);
    EXPECT_NEAR(d.distance_of(Semantic::TIs), euclid(Matrix{{1, 1}, {1.1, 1}}, protos.features), 1e-15);
}

TEST(Disentangle, FrozenOrderOverridesRanking) {
    const Matrix x{{0, 0}, {1, 1}, {2, 2}};
    const SubspacePartition p = partition_of(x, {0, 1, 2});
    const DisentangledBag d = disentangle_from_distances(p, x, Vector{0, 0}, {0.1, 0.2, 0.3}, RankOrder{2, 1, 0});
    EXPECT_EQ(d.semantic_of_cluster[2], Semantic::TIs);
    EXPECT_EQ(d.semantic_of_cluster[0], Semantic::BGIs);
}

TEST(Disentangle, EmptyClusterUsesBagMean) {
    const Matrix x{{0, 0}, {2, 2}};
    const SubspacePartition p = partition_of(x, {0, 1});
    const DisentangledBag d = disentangle_from_distances(p, x, Vector{0, 0}, {0.1, 0.2, 0.3});
    EXPECT_TRUE(d.degenerate);
    EXPECT_DOUBLE_EQ(d.pooled[2][0], 1.0);
}

TEST(Disentangle, EmptyPrototypesRejected) {
    const Matrix x{{0, 0}, {1, 1}, {2, 2}};
    const SubspacePartition p = partition_of(x, {0, 1, 2});
    PrototypeSet protos;
    protos.features = Matrix(0, 2);
    EXPECT_THROW(disentangle_with(p, x, protos, [](const Matrix&, const Matrix&) { return 0.0; }), EmptySetError);
}

TEST(Disentangle, CfdRecoversSyntheticTumorCluster) {
    // Well-separated components with the identity metric: the tumor cluster is
    // closest to prototypes drawn from the tumor component.
    SynthConfig cfg;
    cfg.rho = 0.2;
    cfg.delta = 0.0;
    cfg.separation = 2.0;
    Rng rng(5);
    const Bag bag = generate_bag_with(cfg, 0, 100, 0, rng);
    const PrototypeSet protos = sample_prototypes(cfg);
    const SubspacePartition p = cluster(bag.features, MetricMatrix::identity(cfg.n_in), 3, 1);
    const FrequencySample freqs = FrequencySample::draw(256, cfg.n_in, 1.0, 3);
    const DisentangledBag d = disentangle(p, bag.features, protos, freqs);
    std::size_t hits = 0, tumors = 0;
    for (std::size_t i = 0; i < bag.roles.size(); ++i) {
        if (bag.roles[i] != Role::tumor) continue;
        ++tumors;
        hits += d.instance_map[i] == Semantic::TIs;
    }
    EXPECT_EQ(hits, tumors);
}
