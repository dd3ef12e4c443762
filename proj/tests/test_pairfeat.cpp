#include <gtest/gtest.h>

#include <random>

#include "bse/pairfeat.hpp"

using namespace bse;

namespace {

Embedding random_embedding(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Embedding z;
    z.coords.resize(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) z.coords(i, j) = nd(rng);
    for (std::size_t j = 0; j < m; ++j) {
        z.source_columns.push_back(j);
        z.values_used.push_back(static_cast<double>(m - j));
    }
    return z;
}

struct Fixture {
    LccDiseaseSets sets;
    LabeledPairs labels;
};

Fixture random_diseases(std::size_t n, std::size_t diseases, std::mt19937_64& rng) {
    Fixture f;
    for (std::size_t d = 0; d < diseases; ++d) {
        std::string name = "D" + std::to_string(d);
        f.sets.diseases.push_back(name);
        f.sets.lookup.emplace(name, d);
        std::vector<NodeIndex> genes;
        std::size_t size = 1 + rng() % 6;
        while (genes.size() < size) {
            NodeIndex g = static_cast<NodeIndex>(rng() % n);
            if (std::find(genes.begin(), genes.end(), g) == genes.end()) genes.push_back(g);
        }
        std::sort(genes.begin(), genes.end());
        f.sets.members.push_back(genes);
        f.sets.excluded.push_back(0);
    }
    for (std::size_t a = 0; a < diseases; ++a)
        for (std::size_t b = a + 1; b < diseases; ++b)
            f.labels.pairs.push_back({"D" + std::to_string(a), "D" + std::to_string(b), static_cast<int>(rng() % 2), 1.0});
    return f;
}

}  // namespace

TEST(DiseaseFeature, SingleAndPair) {
    std::mt19937_64 rng(1);
    auto z = random_embedding(10, 4, rng);
    std::vector<NodeIndex> one{3};
    EXPECT_TRUE(disease_feature(z, one).values == z.coords.row(3).transpose());
    std::vector<NodeIndex> two{7, 2};
    EXPECT_TRUE(disease_feature(z, two).values == (z.coords.row(2) + z.coords.row(7)).transpose());
    EXPECT_THROW(disease_feature(z, std::vector<NodeIndex>{}), Error);
}

TEST(DiseaseFeature, MatchesNaiveSum) {
    std::mt19937_64 rng(2);
    auto z = random_embedding(10, 4, rng);
    std::vector<NodeIndex> genes{9, 1, 4, 6, 0};
    auto f = disease_feature(z, genes);
    std::vector<NodeIndex> asc = genes;
    std::sort(asc.begin(), asc.end());
    for (int c = 0; c < 4; ++c) {
        double s = 0;
        for (auto g : asc) s += z.coords(g, c);
        EXPECT_EQ(f.values[c], s);
    }
}

TEST(Assemble, WidthLabelsAndOrder) {
    std::mt19937_64 rng(3);
    auto z = random_embedding(30, 3, rng);
    auto fx = random_diseases(30, 2, rng);
    auto ds = assemble_dataset(z, fx.sets, fx.labels);
    EXPECT_EQ(ds.samples(), 1u);
    EXPECT_EQ(ds.width(), 6u);
    EXPECT_EQ(ds.labels[0], fx.labels.pairs[0].label);
    auto fa = disease_feature(z, fx.sets.members[0]);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(ds.features(0, c), fa.values[c]);
}

TEST(Assemble, ColumnPermutationPermutesBothHalves) {
    std::mt19937_64 rng(4);
    auto z = random_embedding(30, 4, rng);
    auto fx = random_diseases(30, 5, rng);
    auto ds = assemble_dataset(z, fx.sets, fx.labels);
    auto zp = z.select_positions({2, 0, 3, 1});
    auto dp = assemble_dataset(zp, fx.sets, fx.labels);
    const int perm[] = {2, 0, 3, 1};
    for (Eigen::Index r = 0; r < ds.features.rows(); ++r)
        for (int c = 0; c < 4; ++c) {
            EXPECT_EQ(dp.features(r, c), ds.features(r, perm[c]));
            EXPECT_EQ(dp.features(r, 4 + c), ds.features(r, 4 + perm[c]));
        }
}

TEST(Assemble, CanonicalOrientationSwaps) {
    std::mt19937_64 rng(5);
    auto z = random_embedding(20, 2, rng);
    auto fx = random_diseases(20, 2, rng);
    fx.labels.pairs[0] = {"D1", "D0", 1, 2.0};
    auto file = assemble_dataset(z, fx.sets, fx.labels);
    auto canon = assemble_dataset(z, fx.sets, fx.labels, PairOrientation::Canonical);
    EXPECT_EQ(file.pairs[0].first, "D1");
    EXPECT_EQ(canon.pairs[0].first, "D0");
    EXPECT_EQ(file.features(0, 0), canon.features(0, 2));
}

TEST(SelectCoordinates, IdentitySingleAndUnknown) {
    std::mt19937_64 rng(6);
    auto z = random_embedding(30, 4, rng);
    auto fx = random_diseases(30, 6, rng);
    auto ds = assemble_dataset(z, fx.sets, fx.labels);
    std::vector<std::size_t> all{0, 1, 2, 3};
    auto same = select_coordinates(ds, all);
    EXPECT_TRUE(same.features == ds.features);
    EXPECT_EQ(same.column_origin, ds.column_origin);
    std::vector<std::size_t> one{2};
    auto s = select_coordinates(ds, one);
    ASSERT_EQ(s.width(), 2u);
    EXPECT_TRUE(s.features.col(0) == ds.features.col(2));
    EXPECT_TRUE(s.features.col(1) == ds.features.col(6));
    std::vector<std::size_t> bad{7};
    EXPECT_THROW(select_coordinates(ds, bad), Error);
}

TEST(SelectCoordinates, CommutesWithColumnRestriction) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        auto z = random_embedding(40, 8, rng);
        auto fx = random_diseases(40, 6, rng);
        auto ds = assemble_dataset(z, fx.sets, fx.labels);
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < 8; ++c)
            if (rng() % 2) cols.push_back(c);
        if (cols.empty()) cols.push_back(rng() % 8);
        auto restricted = assemble_dataset(z.select_positions(cols), fx.sets, fx.labels);
        auto selected = select_coordinates(ds, cols);
        EXPECT_TRUE(restricted.features == selected.features);
    }
}
