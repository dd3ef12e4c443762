#include <gtest/gtest.h>

#include "bse/netio.hpp"
#include "helpers.hpp"

using namespace bse;
using namespace testing_helpers;

TEST(EdgeList, DuplicatesAndReversedRowsCollapse) {
    auto dir = temp_dir("netio_dup");
    auto p = write_file(dir, "e.tsv", "1\t2\n2\t1\n2\t3\n");
    EdgeListStats st;
    auto g = load_edge_list(p, &st);
    EXPECT_EQ(g.size(), 3u);
    EXPECT_EQ(g.edge_count, 2u);
    EXPECT_EQ(st.duplicates, 1u);
}

TEST(EdgeList, SelfLoopKeepsNodeDropsEdge) {
    auto dir = temp_dir("netio_loop");
    auto p = write_file(dir, "e.tsv", "5\t5\n");
    EdgeListStats st;
    auto g = load_edge_list(p, &st);
    EXPECT_EQ(g.size(), 1u);
    EXPECT_EQ(g.edge_count, 0u);
    EXPECT_EQ(st.self_loops, 1u);
    EXPECT_NE(g.index_of(5), kNoIndex);
}

TEST(EdgeList, CommentsAndBlankLinesSkipped) {
    auto dir = temp_dir("netio_comment");
    auto p = write_file(dir, "e.tsv", "# header\n\n1\t2\n");
    EXPECT_EQ(load_edge_list(p).edge_count, 1u);
}

TEST(EdgeList, MalformedRowReportsLine) {
    auto dir = temp_dir("netio_bad");
    auto p = write_file(dir, "e.tsv", "1\t2\n3\tx\n");
    try {
        load_edge_list(p);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    auto q = write_file(dir, "f.tsv", "1\t2\t3\n");
    EXPECT_THROW(load_edge_list(q), ParseError);
}

TEST(EdgeList, EmptyFileIsError) {
    auto dir = temp_dir("netio_empty");
    auto p = write_file(dir, "e.tsv", "# nothing\n");
    EXPECT_THROW(load_edge_list(p), Error);
    EXPECT_THROW(load_edge_list(dir + "/missing.tsv"), Error);
}

TEST(EdgeList, RoundTrip) {
    auto dir = temp_dir("netio_rt");
    auto g = InteractomeGraph::from_edges({{10, 20}, {20, 30}, {40, 40}});
    write_edge_list(g, dir + "/g.tsv");
    auto h = load_edge_list(dir + "/g.tsv");
    EXPECT_EQ(h.node_ids, g.node_ids);
    EXPECT_EQ(h.adjacency, g.adjacency);
}

TEST(Lcc, TieGoesToSmallestGeneId) {
    auto g = InteractomeGraph::from_edges({{4, 5}, {5, 6}, {4, 6}, {1, 2}, {2, 3}, {1, 3}, {7, 8}});
    auto r = largest_connected_component(g);
    EXPECT_EQ(r.graph.node_ids, (std::vector<GeneId>{1, 2, 3}));
    EXPECT_EQ(r.graph.edge_count, 3u);
    EXPECT_EQ(r.old_to_new[g.index_of(7)], kNoIndex);
    EXPECT_TRUE(is_connected(r.graph));
}

TEST(Lcc, SingleEdge) {
    auto r = largest_connected_component(InteractomeGraph::from_edges({{1, 2}}));
    EXPECT_EQ(r.graph.size(), 2u);
}

TEST(Lcc, NodeIdsSortedAndAdjacencyConsistent) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        auto e = random_connected_edges(60, 40, rng);
        e.emplace_back(100, 101);  // separate small component
        auto r = largest_connected_component(graph_from(e));
        EXPECT_EQ(r.graph.size(), 60u);
        EXPECT_TRUE(std::is_sorted(r.graph.node_ids.begin(), r.graph.node_ids.end()));
        for (std::size_t i = 0; i < r.graph.size(); ++i)
            for (auto j : r.graph.adjacency[i]) {
                const auto& back = r.graph.adjacency[j];
                EXPECT_TRUE(std::find(back.begin(), back.end(), i) != back.end());
            }
    }
}

TEST(DiseaseGenes, SetsAndDuplicates) {
    auto dir = temp_dir("netio_dg");
    auto p = write_file(dir, "d.tsv", "asthma\t20\nasthma\t10\ngout\t10\nasthma\t10\n");
    auto m = load_disease_genes(p);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m.diseases[0], "asthma");
    EXPECT_EQ(m.gene_sets[0], (std::vector<GeneId>{10, 20}));
    EXPECT_EQ(m.gene_sets[1], (std::vector<GeneId>{10}));
}

TEST(DiseaseGenes, EmptyFileGivesEmptyMap) {
    auto dir = temp_dir("netio_dg_empty");
    auto p = write_file(dir, "d.tsv", "");
    EXPECT_EQ(load_disease_genes(p).size(), 0u);
}

TEST(DiseaseGenes, NonIntegerGeneIsParseError) {
    auto dir = temp_dir("netio_dg_bad");
    auto p = write_file(dir, "d.tsv", "asthma\t10\nasthma\tIL4\n");
    try {
        load_disease_genes(p);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(RrTable, ParseValidateAndRoundTrip) {
    auto dir = temp_dir("netio_rr");
    DiseaseGeneMap m;
    m.add("a", 1);
    m.add("b", 2);
    m.add("c", 3);
    auto p = write_file(dir, "rr.tsv", "a\tb\t1.5\nb\tc\t0\n");
    auto t = load_rr_table(p, &m);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_DOUBLE_EQ(t.rows[0].rr, 1.5);
    write_rr_table(t, dir + "/rt.tsv");
    auto u = load_rr_table(dir + "/rt.tsv", &m);
    EXPECT_EQ(u.rows[1].disease_b, "c");

    EXPECT_THROW(load_rr_table(write_file(dir, "u.tsv", "a\tz\t1\n"), &m), ParseError);
    EXPECT_THROW(load_rr_table(write_file(dir, "d.tsv", "a\tb\t1\nb\ta\t2\n"), &m), ParseError);
    EXPECT_THROW(load_rr_table(write_file(dir, "n.tsv", "a\tb\t-1\n"), &m), ParseError);
}

TEST(Labels, StrictThreshold) {
    RRTable t;
    t.rows = {{"a", "b", 0.0}, {"a", "c", 0.5}, {"b", "c", 2.0}};
    auto l0 = label_pairs(t, 0.0);
    EXPECT_EQ(l0.pairs[0].label, 0);
    EXPECT_EQ(l0.pairs[1].label, 1);
    EXPECT_NEAR(l0.positive_fraction, 2.0 / 3.0, 1e-15);
    auto l1 = label_pairs(t, 1.0);
    EXPECT_EQ(l1.pairs[1].label, 0);
    EXPECT_EQ(l1.pairs[2].label, 1);
}

TEST(Labels, RestrictAndDropEmpty) {
    auto g = InteractomeGraph::from_edges({{1, 2}, {2, 3}, {8, 9}});
    auto lcc = largest_connected_component(g).graph;
    DiseaseGeneMap m;
    m.add("a", 1);
    m.add("a", 8);
    m.add("b", 3);
    m.add("c", 9);
    auto sets = restrict_to_lcc(m, lcc);
    EXPECT_EQ(*sets.find("a"), (std::vector<NodeIndex>{0}));
    EXPECT_EQ(sets.excluded[0], 1u);
    RRTable t;
    t.rows = {{"a", "b", 2.0}, {"a", "c", 2.0}, {"b", "c", 0.0}};
    auto l = label_pairs(t, 1.0);
    EXPECT_EQ(drop_empty_pairs(l, sets), 2u);
    ASSERT_EQ(l.pairs.size(), 1u);
    EXPECT_DOUBLE_EQ(l.positive_fraction, 1.0);
}
