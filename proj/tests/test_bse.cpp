#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bse/bse.hpp"

using namespace bse;

namespace {

// m source columns named 10, 11, ...; column 10 + planted carries the label in both slots
PairDataset planted(std::size_t n, std::size_t m, std::size_t planted, std::uint64_t seed, double strength = 1.5) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    PairDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(2 * m));
    for (Slot s : {Slot::A, Slot::B})
        for (std::size_t c = 0; c < m; ++c) ds.column_origin.push_back({s, 10 + c});
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i % 3 == 0;
        ds.labels.push_back(y);
        ds.pairs.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
        for (std::size_t c = 0; c < 2 * m; ++c) {
            double v = nd(rng);
            if (c % m == planted) v += y ? strength : 0.0;
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return ds;
}

VariantConfig small_cfg(std::size_t d, std::uint64_t seed = 1) {
    VariantConfig c;
    c.d = d;
    c.k = 8;
    c.inner_folds = 3;
    c.outer_folds = 3;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Select, SingleColumnMatchesExhaustiveSearch) {
    for (std::uint64_t s : {1u, 2u, 3u}) {
        auto ds = planted(90, 6, 3, s);
        auto cfg = small_cfg(1, s);
        auto r = bse_select(ds, cfg);
        ASSERT_EQ(r.selected.size(), 1u);
        EXPECT_EQ(r.selected[0], 13u);

        auto plan = stratified_kfold(ds.labels, 3, derive_seed(s, "inner-cv"));
        double best = -1;
        for (auto c : ds.source_columns()) {
            std::vector<std::size_t> cols{c};
            auto sub = select_coordinates(ds, cols);
            best = std::max(best, cv_mean_auc(sub.features, sub.labels, plan, cfg.svm));
        }
        EXPECT_EQ(r.trace[0], best);
    }
}

TEST(Select, ZeroAndTooMany) {
    auto ds = planted(30, 4, 0, 1);
    auto r = bse_select(ds, small_cfg(0));
    EXPECT_TRUE(r.selected.empty());
    EXPECT_THROW(bse_select(ds, small_cfg(5)), Error);
}

TEST(Select, WinnerIsArgmaxEveryRound) {
    auto ds = planted(60, 5, 2, 4);
    auto cfg = small_cfg(3);
    cfg.record_candidates = true;
    auto r = bse_select(ds, cfg);
    ASSERT_EQ(r.candidates.size(), 3u);
    std::set<std::size_t> chosen;
    for (std::size_t round = 0; round < 3; ++round) {
        double best = -1;
        for (const auto& c : r.candidates[round]) {
            EXPECT_FALSE(chosen.count(c.column));
            best = std::max(best, c.mean_auc);
        }
        EXPECT_EQ(best, r.trace[round]);
        chosen.insert(r.selected[round]);
        EXPECT_EQ(r.candidates[round].size(), 5 - round);
    }
    EXPECT_EQ(chosen.size(), 3u);
}

TEST(Select, DeterministicAndWorkerIndependent) {
    auto ds = planted(60, 5, 1, 5);
    auto cfg = small_cfg(3, 9);
    auto a = bse_select(ds, cfg);
    cfg.workers = 3;
    auto b = bse_select(ds, cfg);
    EXPECT_EQ(a.selected, b.selected);
    EXPECT_EQ(a.trace, b.trace);
}

TEST(Select, CacheDoesNotChangeResults) {
    auto ds = planted(60, 5, 1, 6);
    auto cfg = small_cfg(3, 2);
    auto plan = stratified_kfold(ds.labels, 3, 77);
    ScoreCache cache;
    auto a = bse_select(ds, cfg, {}, &plan, &cache);
    auto b = bse_select(ds, cfg, {}, &plan, &cache);  // fully served from cache
    auto c = bse_select(ds, cfg, {}, &plan);
    EXPECT_EQ(a.selected, c.selected);
    EXPECT_EQ(a.trace, c.trace);
    EXPECT_EQ(b.trace, c.trace);
    EXPECT_EQ(a.inner_seed, 77u);
}

TEST(Select, ExactTiesUseSeededStream) {
    auto ds = planted(45, 3, 0, 7);
    // duplicate column 10 as column 12 so round one is an exact tie
    ds.features.col(2) = ds.features.col(0);
    ds.features.col(5) = ds.features.col(3);
    std::set<std::size_t> firsts;
    for (std::uint64_t s = 0; s < 16; ++s) {
        auto r = bse_select(ds, small_cfg(1, s));
        firsts.insert(r.selected[0]);
        EXPECT_EQ(bse_select(ds, small_cfg(1, s)).selected, r.selected);
    }
    EXPECT_EQ(firsts, (std::set<std::size_t>{10, 12}));
}

TEST(Select, NestedSeesOnlyGivenRows) {
    auto ds = planted(60, 4, 2, 8);
    auto cfg = small_cfg(2);
    cfg.mode = SelectionMode::Nested;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < 45; ++i) rows.push_back(i);
    auto r = bse_select(ds, cfg, rows);
    // rewriting rows outside the visible set must not matter
    auto ds2 = ds;
    ds2.features.bottomRows(15).setRandom();
    auto r2 = bse_select(ds2, cfg, rows);
    EXPECT_EQ(r.selected, r2.selected);
    EXPECT_EQ(r.trace, r2.trace);
}

TEST(Rank, SelectExamples) {
    std::vector<double> v{2.0, 5.0, 5.0, 1.0, 3.0};
    EXPECT_EQ(rank_select(v, 3), (std::vector<std::size_t>{1, 2, 4}));
    EXPECT_EQ(rank_select(v, 0), std::vector<std::size_t>{});
    EXPECT_THROW(rank_select(v, 6), Error);
}

TEST(Rank, UnionFirstM) {
    std::vector<SelectionResult> rs(3);
    rs[0].selected = {4, 1, 9};
    rs[1].selected = {1, 7, 2};
    rs[2].selected = {4, 7, 0};
    EXPECT_EQ(union_first_m(rs, 2), (std::vector<std::size_t>{1, 4, 7}));
    EXPECT_EQ(union_first_m(rs, 1), (std::vector<std::size_t>{1, 4}));
    EXPECT_THROW(union_first_m(rs, 4), Error);
}

TEST(Evaluate, RankVariantUsesTopValues) {
    auto ds = planted(60, 5, 4, 9);
    auto cfg = small_cfg(2);
    cfg.variant = Variant::E2;
    std::vector<double> values{1, 9, 3, 8, 2};
    auto ev = evaluate_variant(cfg, ds, values);
    ASSERT_EQ(ev.folds.size(), 3u);
    EXPECT_TRUE(ev.selections.empty());
    for (const auto& c : ev.columns) EXPECT_EQ(c, (std::vector<std::size_t>{11, 13}));
    auto direct = evaluate_fixed_columns(ds, ev.columns[0], ev.outer_plan, cfg.svm);
    for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(direct[f].roc_auc, ev.folds[f].roc_auc);
}

TEST(Evaluate, SelectVariantPerFoldSelections) {
    auto ds = planted(60, 5, 4, 10);
    auto cfg = small_cfg(2);
    std::vector<double> values(5, 1.0);
    auto ev = evaluate_variant(cfg, ds, values);
    ASSERT_EQ(ev.selections.size(), 3u);
    for (std::size_t f = 0; f < 3; ++f) {
        EXPECT_EQ(ev.columns[f], ev.selections[f].selected);
        EXPECT_EQ(ev.columns[f][0], 14u);
        // each fold's record equals a fresh run with that fold's seed
        VariantConfig inner = cfg;
        inner.seed = derive_seed(cfg.seed, "select", {f});
        auto plan = stratified_kfold(ds.labels, 3, derive_seed(cfg.seed, "inner-cv"));
        EXPECT_EQ(bse_select(ds, inner, {}, &plan).selected, ev.selections[f].selected);
    }
    auto again = evaluate_variant(cfg, ds, values);
    for (std::size_t f = 0; f < 3; ++f) EXPECT_EQ(again.folds[f].roc_auc, ev.folds[f].roc_auc);
    EXPECT_GT(ev.summary.mean.roc_auc, 0.7);

    auto curve = prefix_curve(ev, ds, cfg.svm);
    ASSERT_EQ(curve.size(), 2u);
    EXPECT_DOUBLE_EQ(curve[1].roc_auc, ev.summary.mean.roc_auc);
}

TEST(Evaluate, Summary) {
    std::vector<MetricSet> folds(2);
    folds[0].roc_auc = 0.6;
    folds[1].roc_auc = 0.8;
    auto s = summarize(folds);
    EXPECT_DOUBLE_EQ(s.mean.roc_auc, 0.7);
    EXPECT_NEAR(s.std.roc_auc, std::sqrt(0.02), 1e-15);
}

TEST(Records, RoundTrip) {
    SelectionResult r;
    r.variant = Variant::E5;
    r.seed = 12345678901234ull;
    r.inner_seed = 42;
    r.mode = SelectionMode::Nested;
    r.inner_folds = 5;
    r.selected = {3, 0, 17};
    r.trace = {0.61, 0.7123456789012345, 0.75};
    std::istringstream in("# header\n" + format_selection(r, 0) + format_selection(r, 1));
    auto back = parse_selections(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].variant, Variant::E5);
    EXPECT_EQ(back[1].seed, r.seed);
    EXPECT_EQ(back[1].inner_seed, 42u);
    EXPECT_EQ(back[1].mode, SelectionMode::Nested);
    EXPECT_EQ(back[1].selected, r.selected);
    EXPECT_EQ(back[1].trace, r.trace);
    std::istringstream bad("garbage line\n");
    EXPECT_THROW(parse_selections(bad), Error);
}
