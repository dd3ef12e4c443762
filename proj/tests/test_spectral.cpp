#include <gtest/gtest.h>

#include <random>

#include "bse/graphdist.hpp"
#include "bse/spectral.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bse;
using namespace testing_helpers;

namespace {

Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = nd(rng);
    return m;
}

oracle::Dense to_dense(const Matrix& m) {
    oracle::Dense d(m.rows(), std::vector<double>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
    return d;
}

Matrix euclidean_distances(const Matrix& pts) {
    Matrix d(pts.rows(), pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        for (Eigen::Index j = 0; j < pts.rows(); ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
    return d;
}

double rel_frob(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST(GramCenter, TwoPoints) {
    Matrix d(2, 2);
    d << 0, 1, 1, 0;
    auto g = gram_center(d).values;
    EXPECT_NEAR(g(0, 0), 0.25, 1e-15);
    EXPECT_NEAR(g(0, 1), -0.25, 1e-15);
    EXPECT_NEAR(g(1, 1), 0.25, 1e-15);
}

TEST(GramCenter, AnnihilatesOnesAndIsSymmetric) {
    std::mt19937_64 rng(3);
    auto g = graph_from(random_connected_edges(40, 30, rng));
    auto gm = gram_center(all_pairs_shortest_paths(g)).values;
    EXPECT_LT((gm * Vector::Ones(40)).norm(), 1e-9);
    EXPECT_TRUE(gm == gm.transpose());
}

TEST(GramCenter, HopAndRealOverloadsAgree) {
    std::mt19937_64 rng(9);
    auto d = all_pairs_shortest_paths(graph_from(random_connected_edges(30, 20, rng)));
    Matrix dm = DistanceOp(d).dense();
    EXPECT_LT((gram_center(d).values - gram_center(dm).values).norm(), 1e-10);
}

TEST(EigTopk, IdentityAndDiagonal) {
    auto b = eig_sym_topk(Matrix::Identity(3, 3), 3);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(b.values[i], 1.0, 1e-14);
    Matrix m = Vector((Vector(3) << 3, 1, 2).finished()).asDiagonal();
    auto c = eig_sym_topk(m, 2);
    EXPECT_NEAR(c.values[0], 3.0, 1e-14);
    EXPECT_NEAR(c.values[1], 2.0, 1e-14);
    EXPECT_NEAR(c.vectors(0, 0), 1.0, 1e-14);  // sign rule: largest entry positive
    EXPECT_NEAR(c.vectors(2, 1), 1.0, 1e-14);
}

TEST(EigTopk, MatchesJacobiDenseAndIterative) {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 6; ++rep) {
        const std::size_t n = 8 + rep * 9;
        Matrix m = random_symmetric(n, rng);
        auto [w, v] = oracle::jacobi_eigen(to_dense(m));
        std::sort(w.begin(), w.end(), std::greater<>());
        for (bool iterative : {false, true}) {
            EigenOptions opt;
            opt.force_iterative = iterative;
            const std::size_t k = std::min<std::size_t>(n, 6);
            auto b = eig_sym_topk(m, k, opt);
            for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(b.values[i], w[i], 1e-8) << "n=" << n << " it=" << iterative;
            for (std::size_t i = 0; i < k; ++i) {
                double res = (m * b.vectors.col(i) - b.values[i] * b.vectors.col(i)).norm();
                EXPECT_LE(res, 1e-7 * m.norm());
            }
        }
    }
}

TEST(EigTopk, IterativeOnLargeCenteredOperator) {
    std::mt19937_64 rng(21);
    auto d = all_pairs_shortest_paths(graph_from(random_connected_edges(300, 250, rng)));
    EigenOptions opt;
    opt.force_iterative = true;
    auto it = centered_basis(d, 10, opt);
    auto dn = centered_basis(d, 10);
    CenteredGramOp op(d);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(it.values[i], dn.values[i], 1e-6 * std::abs(dn.values[0]));
        Vector y;
        op.apply(it.vectors.col(i), y);
        EXPECT_LE((y - it.values[i] * it.vectors.col(i)).norm(), 1e-7 * op.frobenius());
    }
}

TEST(EigTopk, IterationCapNamesPair) {
    std::mt19937_64 rng(2);
    Matrix m = random_symmetric(200, rng);
    EigenOptions opt;
    opt.force_iterative = true;
    opt.max_iterations = 40;
    opt.tol = 1e-14;
    try {
        eig_sym_topk(m, 20, opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("eigenpair"), std::string::npos);
    }
}

TEST(SvdSym, AbsoluteValuesAndSquareIdentity) {
    Matrix m(2, 2);
    m << -3, 0, 0, 1;
    auto b = svd_sym_topk(m, 2);
    EXPECT_NEAR(b.values[0], 3.0, 1e-14);
    EXPECT_NEAR(b.values[1], 1.0, 1e-14);

    std::mt19937_64 rng(4);
    auto d = all_pairs_shortest_paths(graph_from(random_connected_edges(25, 20, rng)));
    Matrix dm = DistanceOp(d).dense();
    auto s = svd_sym_topk(d, 25);
    Matrix recon = s.vectors * s.values.array().square().matrix().asDiagonal() * s.vectors.transpose();
    EXPECT_LT(rel_frob(recon, dm * dm), 1e-6);
    for (int i = 0; i < 25; ++i) {
        Vector u = s.vectors.col(i);
        EXPECT_LT((dm * (dm * u) - s.values[i] * s.values[i] * u).norm(), 1e-6 * s.values[0] * s.values[0]);
    }
}

TEST(SvdSym, MatchesJacobiWithSignFix) {
    std::mt19937_64 rng(6);
    Matrix m = random_symmetric(8, rng);
    auto [w, v] = oracle::jacobi_eigen(to_dense(m));
    std::vector<std::size_t> idx(8);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return std::abs(w[a]) > std::abs(w[b]); });
    auto s = svd_sym_topk(m, 8);
    for (std::size_t c = 0; c < 8; ++c) {
        EXPECT_NEAR(s.values[c], std::abs(w[idx[c]]), 1e-9);
        Vector u(8);
        for (int r = 0; r < 8; ++r) u[r] = v[r][idx[c]];
        Eigen::Index big;
        u.cwiseAbs().maxCoeff(&big);
        if (u[big] < 0) u = -u;
        EXPECT_LT((u - s.vectors.col(c)).norm(), 1e-7);
    }
}

TEST(EmbedCentered, TwoPointsAndSquare) {
    Matrix d(2, 2);
    d << 0, 1, 1, 0;
    auto z = embed_centered(eig_sym_topk(gram_center(d).values, 2), 1);
    EXPECT_NEAR(std::abs(z.coords(0, 0)), 0.5, 1e-12);
    EXPECT_NEAR(z.coords(0, 0), -z.coords(1, 0), 1e-12);

    Matrix sq(4, 2);
    sq << 0, 0, 1, 0, 1, 1, 0, 1;
    Matrix ds = euclidean_distances(sq);
    auto e = embed_centered(eig_sym_topk(gram_center(ds).values, 4), 2);
    EXPECT_LT((euclidean_distances(e.coords) - ds).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(embed_centered(eig_sym_topk(gram_center(ds).values, 4), 0).dims(), 0u);
}

TEST(EmbedCentered, CollinearPoints) {
    Matrix p(3, 1);
    p << 0, 1, 2;
    Matrix d = euclidean_distances(p);
    auto e = embed_centered(eig_sym_topk(gram_center(d).values, 3), 1);
    auto rec = oracle::pairwise_distances({{e.coords(0, 0)}, {e.coords(1, 0)}, {e.coords(2, 0)}});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(rec[i][j], d(i, j), 1e-9);
}

TEST(EmbedCentered, TooFewPositiveReportsCount) {
    Matrix p(3, 1);
    p << 0, 1, 2;
    auto b = eig_sym_topk(gram_center(euclidean_distances(p)).values, 3);
    try {
        embed_centered(b, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("only 1 positive"), std::string::npos);
    }
}

TEST(EmbedScaled, DiagonalAndGramIdentity) {
    Matrix m = Vector((Vector(3) << 3, 1, 2).finished()).asDiagonal();
    auto z = embed_scaled(svd_sym_topk(m, 3), 2);
    EXPECT_NEAR(z.coords(0, 0), 3.0, 1e-14);
    EXPECT_NEAR(z.coords(2, 1), 2.0, 1e-14);
    EXPECT_EQ(embed_scaled(svd_sym_topk(m, 3), 0).dims(), 0u);

    std::mt19937_64 rng(8);
    auto d = all_pairs_shortest_paths(graph_from(random_connected_edges(30, 25, rng)));
    Matrix dm = DistanceOp(d).dense();
    auto full = embed_scaled(svd_sym_topk(d, 30), 30);
    EXPECT_LT(rel_frob(full.coords * full.coords.transpose(), dm * dm), 1e-6);
}

TEST(EmbedVectors, OrthonormalAndScaledRelation) {
    std::mt19937_64 rng(10);
    auto d = all_pairs_shortest_paths(graph_from(random_connected_edges(30, 25, rng)));
    auto b = svd_sym_topk(d, 12);
    auto u = embed_vectors(b, 12);
    auto s = embed_scaled(b, 12);
    EXPECT_LT((u.coords.transpose() * u.coords - Matrix::Identity(12, 12)).norm(), 1e-8);
    for (int j = 0; j < 12; ++j)
        if (b.values[j] > 0) EXPECT_LT((s.coords.col(j) / b.values[j] - u.coords.col(j)).norm(), 1e-10);
    auto id = embed_vectors(svd_sym_topk(Matrix::Identity(3, 3), 3), 3);
    EXPECT_LT((id.coords.cwiseAbs() * id.coords.cwiseAbs().transpose() - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(RawEmbedding, ClampValuesAndSigns) {
    auto k4 = all_pairs_shortest_paths(graph_from({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
    RawEmbeddingOptions opt;
    auto e1 = build_raw_embedding(Variant::E1, k4, opt);
    EXPECT_EQ(e1.dims(), 4u);
    EXPECT_EQ(e1.variant, Variant::E1);

    std::mt19937_64 rng(12);
    auto d = all_pairs_shortest_paths(graph_from(random_connected_edges(60, 50, rng)));
    opt.k = 20;
    for (Variant v : {Variant::E1, Variant::E3, Variant::E5}) {
        auto e = build_raw_embedding(v, d, opt);
        for (std::size_t i = 1; i < e.values_used.size(); ++i) EXPECT_GE(e.values_used[i - 1], e.values_used[i]);
        auto again = build_raw_embedding(v, d, opt);
        EXPECT_TRUE(e.coords == again.coords);
    }
    auto e3 = build_raw_embedding(Variant::E3, d, opt);
    EXPECT_LT((e3.coords.transpose() * e3.coords - Matrix::Identity(20, 20)).norm(), 1e-8);
    EXPECT_THROW(build_raw_embedding(Variant::E2, d, opt), Error);
}

TEST(RawEmbedding, IsomapOfGridRecoversDistances) {
    // a path graph is exactly Euclidean in one dimension
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i + 1 < 12; ++i) e.emplace_back(i, i + 1);
    auto d = all_pairs_shortest_paths(graph_from(e));
    RawEmbeddingOptions opt;
    opt.k = 5;
    auto z = build_raw_embedding(Variant::E5, d, opt);
    ASSERT_EQ(z.dims(), 1u);  // truncated to the single positive eigenvalue
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(std::abs(z.coords(i, 0) - z.coords(j, 0)), d(i, j), 1e-8);
}

TEST(EmbeddingFile, RoundTrip) {
    auto dir = temp_dir("emb_rt");
    std::mt19937_64 rng(1);
    auto d = all_pairs_shortest_paths(graph_from(random_connected_edges(15, 5, rng)));
    RawEmbeddingOptions opt;
    opt.k = 4;
    auto z = build_raw_embedding(Variant::E1, d, opt);
    std::vector<GeneId> ids(15);
    std::iota(ids.begin(), ids.end(), GeneId{1});
    write_embedding(z, ids, dir + "/z.csv");
    auto r = read_embedding(dir + "/z.csv");
    EXPECT_EQ(r.node_ids, ids);
    EXPECT_TRUE(r.embedding.coords == z.coords);
    EXPECT_EQ(r.embedding.values_used, z.values_used);
    EXPECT_EQ(r.embedding.variant, Variant::E1);
}
