#pragma once

// Spectral embeddings of a hop-distance matrix.
//
//   centered (isomap / classical MDS):  G = -1/2 H (D o D) H,  G = U L U^T,  Z = U_d L_d^(1/2)
//   uncentered (SVD of symmetric D):    D = U S V^T,  Z = U_d S_d  or  Z = U_d
//
// Top-k eigenpairs come from a dense solver for small n and from a thick-restart
// Lanczos iteration with full reorthogonalization otherwise. Every basis column is
// sign-normalized so that its largest-magnitude entry is positive.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "graphdist.hpp"
#include "netio.hpp"

namespace bse {

// ---------------------------------------------------------------------------
// variants

enum class Variant { E1, E2, E3, E4, E5, E6 };

inline constexpr std::array<Variant, 6> kAllVariants = {Variant::E1, Variant::E2, Variant::E3,
                                                        Variant::E4, Variant::E5, Variant::E6};

inline std::string to_string(Variant v) { return "E" + std::to_string(static_cast<int>(v) + 1); }

inline Variant parse_variant(const std::string& s) {
    for (Variant v : kAllVariants)
        if (to_string(v) == s) return v;
    throw Error("unknown variant '" + s + "' (expected E1..E6)");
}

/// Odd variants run supervised selection; even variants keep the top-ranked columns.
inline bool is_select_variant(Variant v) { return static_cast<int>(v) % 2 == 0; }

/// The variant that builds the raw embedding a given variant draws its columns from.
inline Variant raw_variant(Variant v) { return static_cast<Variant>(static_cast<int>(v) / 2 * 2); }

/// Short method family used in report column names: emb (E1/E2), vect (E3/E4), iso (E5/E6).
inline std::string method_family(Variant v) {
    static const char* names[] = {"emb", "vect", "iso"};
    return names[static_cast<int>(v) / 2];
}

/// Report label, e.g. emb_s / emb_r.
inline std::string method_label(Variant v) { return method_family(v) + (is_select_variant(v) ? "_s" : "_r"); }

// ---------------------------------------------------------------------------
// types

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct GramMatrix {
    Matrix values;
};

enum class BasisKind { CenteredEigen, RawSvd };

struct SpectralBasis {
    Matrix vectors;  // n x k, orthonormal columns
    Vector values;   // eigenvalues (centered) or singular values (raw), descending
    BasisKind kind = BasisKind::CenteredEigen;

    std::size_t rank() const { return static_cast<std::size_t>(values.size()); }
};

struct Embedding {
    Matrix coords;                            // n x d
    std::vector<std::size_t> source_columns;  // basis column behind each coordinate
    Variant variant = Variant::E1;
    std::vector<double> values_used;
    std::uint64_t seed = 0;

    std::size_t rows() const { return static_cast<std::size_t>(coords.rows()); }
    std::size_t dims() const { return static_cast<std::size_t>(coords.cols()); }

    /// Keeps the given coordinate positions (not source columns), in the given order.
    Embedding select_positions(const std::vector<std::size_t>& positions) const {
        Embedding e;
        e.variant = variant;
        e.seed = seed;
        e.coords.resize(coords.rows(), static_cast<Eigen::Index>(positions.size()));
        for (std::size_t c = 0; c < positions.size(); ++c) {
            if (positions[c] >= dims()) throw Error("embedding position out of range");
            e.coords.col(static_cast<Eigen::Index>(c)) = coords.col(static_cast<Eigen::Index>(positions[c]));
            e.source_columns.push_back(source_columns[positions[c]]);
            if (positions[c] < values_used.size()) e.values_used.push_back(values_used[positions[c]]);
        }
        return e;
    }
};

// ---------------------------------------------------------------------------
// symmetric operators for the eigensolver

/// y = M x for an explicit dense symmetric matrix.
class DenseSymOp {
public:
    explicit DenseSymOp(const Matrix& m) : m_(&m) {}
    std::size_t size() const { return static_cast<std::size_t>(m_->rows()); }
    void apply(const Vector& x, Vector& y) const { y.noalias() = (*m_) * x; }
    double frobenius() const { return m_->norm(); }
    Matrix dense() const { return *m_; }

private:
    const Matrix* m_;
};

/// y = D x, with D the raw hop-count matrix.
class DistanceOp {
public:
    explicit DistanceOp(const DistanceMatrix& d) : d_(&d) {}
    std::size_t size() const { return d_->size(); }
    void apply(const Vector& x, Vector& y) const {
        const std::size_t n = size();
        y.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            auto row = d_->row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += row[j] * x[static_cast<Eigen::Index>(j)];
            y[static_cast<Eigen::Index>(i)] = s;
        }
    }
    double frobenius() const {
        long double s = 0;
        for (Hops h : d_->data()) s += static_cast<long double>(h) * h;
        return std::sqrt(static_cast<double>(s));
    }
    Matrix dense() const {
        const auto n = static_cast<Eigen::Index>(size());
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = (*d_)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        return m;
    }

private:
    const DistanceMatrix* d_;
};

/// y = G x with G = -1/2 H (D o D) H, applied without forming G.
class CenteredGramOp {
public:
    explicit CenteredGramOp(const DistanceMatrix& d) : d_(&d) {
        const std::size_t n = d.size();
        row_mean_.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (Hops h : d.row(i)) s += static_cast<double>(h) * h;
            row_mean_[static_cast<Eigen::Index>(i)] = s / static_cast<double>(n);
        }
        grand_mean_ = row_mean_.mean();
    }
    std::size_t size() const { return d_->size(); }
    void apply(const Vector& x, Vector& y) const {
        const std::size_t n = size();
        Vector xc = x.array() - x.mean();
        y.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            auto row = d_->row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += static_cast<double>(row[j]) * row[j] * xc[static_cast<Eigen::Index>(j)];
            y[static_cast<Eigen::Index>(i)] = s;
        }
        y = -0.5 * (y.array() - y.mean()).matrix();
    }
    double entry(std::size_t i, std::size_t j) const {
        double s = static_cast<double>((*d_)(i, j));
        return -0.5 * (s * s - row_mean_[static_cast<Eigen::Index>(i)] - row_mean_[static_cast<Eigen::Index>(j)] + grand_mean_);
    }
    double frobenius() const {
        long double s = 0;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j) {
                double e = entry(i, j);
                s += static_cast<long double>(e) * e;
            }
        return std::sqrt(static_cast<double>(s));
    }
    Matrix dense() const {
        const auto n = static_cast<Eigen::Index>(size());
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) m(i, j) = m(j, i) = entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        return m;
    }

private:
    const DistanceMatrix* d_;
    Vector row_mean_;
    double grand_mean_ = 0.0;
};

// ---------------------------------------------------------------------------
// eigensolver

enum class EigenOrder { Algebraic, Magnitude };

struct EigenOptions {
    EigenOrder order = EigenOrder::Algebraic;
    std::size_t dense_threshold = 1000;  // dense solver when n <= this
    bool force_iterative = false;
    std::size_t max_iterations = 10000;  // operator applications
    double tol = 1e-7;                   // residual bound relative to ||M||_F
    std::uint64_t seed = 0x5EED;
};

struct EigenPairs {
    Vector values;
    Matrix vectors;
};

namespace detail {

/// Flips each column so its largest-magnitude entry (first one on ties) is positive.
inline void normalize_signs(Matrix& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index best = 0;
        double mag = -1.0;
        for (Eigen::Index r = 0; r < v.rows(); ++r)
            if (std::abs(v(r, c)) > mag) {
                mag = std::abs(v(r, c));
                best = r;
            }
        if (v.rows() > 0 && v(best, c) < 0) v.col(c) = -v.col(c);
    }
}

/// Positions of the `k` preferred values, best first.
inline std::vector<Eigen::Index> order_values(const Vector& values, EigenOrder order, std::size_t k) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (order == EigenOrder::Magnitude) {
            double ma = std::abs(values[a]), mb = std::abs(values[b]);
            if (ma != mb) return ma > mb;
        }
        return values[a] > values[b];
    });
    idx.resize(std::min(k, idx.size()));
    return idx;
}

template <class Op>
EigenPairs dense_topk(const Op& op, std::size_t k, EigenOrder order) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.dense());
    if (es.info() != Eigen::Success) throw Error("dense eigensolver failed to converge");
    auto idx = order_values(es.eigenvalues(), order, k);
    EigenPairs out;
    out.values.resize(static_cast<Eigen::Index>(idx.size()));
    out.vectors.resize(es.eigenvectors().rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
        out.values[static_cast<Eigen::Index>(c)] = es.eigenvalues()[idx[c]];
        out.vectors.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(idx[c]);
    }
    return out;
}

/// Orthogonalizes r against the first `cols` columns of V (two Gram-Schmidt passes).
inline void orthogonalize(const Matrix& v, Eigen::Index cols, Vector& r) {
    for (int pass = 0; pass < 2; ++pass) {
        if (cols == 0) return;
        Vector h = v.leftCols(cols).transpose() * r;
        r.noalias() -= v.leftCols(cols) * h;
    }
}

inline Vector random_unit(std::size_t n, Rng& rng) {
    Vector x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform_unit(rng) - 0.5;
    return x / x.norm();
}

template <class Op>
EigenPairs lanczos_topk(const Op& op, std::size_t k, const EigenOptions& opt) {
    const std::size_t n = op.size();
    const std::size_t m = std::min(n, std::max<std::size_t>(2 * k + 16, 32));
    const double scale = op.frobenius();
    const double threshold = opt.tol * scale;
    Rng rng(opt.seed);

    Matrix V(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    Matrix W(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    V.col(0) = random_unit(n, rng);
    Eigen::Index filled = 0;  // columns of V whose image is already in W
    std::size_t applications = 0;
    Vector w, residual_vec;

    while (true) {
        // expand the Krylov basis to m columns
        for (Eigen::Index j = filled; j < static_cast<Eigen::Index>(m); ++j) {
            Vector vj = V.col(j);
            op.apply(vj, w);
            W.col(j) = w;
            ++applications;
            Vector r = w;
            orthogonalize(V, j + 1, r);
            double beta = r.norm();
            if (beta <= 1e-12 * std::max(1.0, scale)) {
                // invariant subspace reached; continue with a fresh direction
                r = random_unit(n, rng);
                orthogonalize(V, j + 1, r);
                beta = r.norm();
            }
            if (j + 1 < static_cast<Eigen::Index>(m))
                V.col(j + 1) = r / beta;
            else
                residual_vec = r / beta;
        }

        // Rayleigh-Ritz on the whole basis
        Matrix h = V.transpose() * W;
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        auto idx = order_values(es.eigenvalues(), opt.order, m);

        const std::size_t want = std::min(k, m);
        Matrix y(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        Vector theta(static_cast<Eigen::Index>(m));
        for (std::size_t c = 0; c < m; ++c) {
            y.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(idx[c]);
            theta[static_cast<Eigen::Index>(c)] = es.eigenvalues()[idx[c]];
        }
        Matrix x = V * y.leftCols(static_cast<Eigen::Index>(want));
        Matrix ax = W * y.leftCols(static_cast<Eigen::Index>(want));
        std::size_t first_bad = want;
        for (std::size_t c = 0; c < want; ++c) {
            const auto ci = static_cast<Eigen::Index>(c);
            double res = (ax.col(ci) - theta[ci] * x.col(ci)).norm();
            if (res > threshold) {
                first_bad = c;
                break;
            }
        }
        // once the basis spans the whole space the remaining residual is rounding noise
        if (first_bad == want || m == n) {
            EigenPairs out;
            out.values = theta.head(static_cast<Eigen::Index>(want));
            out.vectors = x;
            return out;
        }
        if (applications >= opt.max_iterations)
            throw Error("eigensolver did not converge within " + std::to_string(opt.max_iterations) +
                        " iterations (eigenpair " + std::to_string(first_bad) + ")");

        // thick restart: keep the best `keep` Ritz vectors plus the residual direction
        const std::size_t keep = std::min(m - 1, want + std::max<std::size_t>(2, (m - want) / 2));
        const auto kk = static_cast<Eigen::Index>(keep);
        Matrix vk = V * y.leftCols(kk);
        Matrix wk = W * y.leftCols(kk);
        V.leftCols(kk) = vk;
        W.leftCols(kk) = wk;
        Vector r = residual_vec;
        orthogonalize(V, kk, r);
        V.col(kk) = r / r.norm();
        filled = kk;
    }
}

}  // namespace detail

/// k leading eigenpairs of a symmetric operator, in the configured order.
template <class Op>
EigenPairs eig_topk(const Op& op, std::size_t k, const EigenOptions& opt = {}) {
    const std::size_t n = op.size();
    if (k > n) throw Error("eig_topk: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    if (k == 0) return {Vector(0), Matrix(static_cast<Eigen::Index>(n), 0)};
    EigenPairs out = (!opt.force_iterative && n <= opt.dense_threshold) ? detail::dense_topk(op, k, opt.order)
                                                                         : detail::lanczos_topk(op, k, opt);
    detail::normalize_signs(out.vectors);
    return out;
}

// ---------------------------------------------------------------------------
// operations

/// Double-centered Gram matrix -1/2 H (D o D) H, filled symmetrically.
inline GramMatrix gram_center(const DistanceMatrix& d) { return {CenteredGramOp(d).dense()}; }

/// Same transform for real-valued distances.
inline GramMatrix gram_center(const Matrix& d) {
    if (d.rows() != d.cols()) throw Error("gram_center: matrix is not square");
    const Matrix sq = d.array().square().matrix();
    const Vector rm = sq.rowwise().mean();
    const double gm = rm.mean();
    const auto n = d.rows();
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) g(i, j) = g(j, i) = -0.5 * (sq(i, j) - rm[i] - rm[j] + gm);
    return {g};
}

/// k largest algebraic eigenpairs of a symmetric matrix, descending.
inline SpectralBasis eig_sym_topk(const Matrix& m, std::size_t k, EigenOptions opt = {}) {
    if (m.rows() != m.cols()) throw Error("eig_sym_topk: matrix is not square");
    opt.order = EigenOrder::Algebraic;
    auto pairs = eig_topk(DenseSymOp(m), k, opt);
    return {std::move(pairs.vectors), std::move(pairs.values), BasisKind::CenteredEigen};
}

/// Centered basis computed straight from the distance matrix (no explicit n x n Gram for large n).
inline SpectralBasis centered_basis(const DistanceMatrix& d, std::size_t k, EigenOptions opt = {}) {
    opt.order = EigenOrder::Algebraic;
    auto pairs = eig_topk(CenteredGramOp(d), k, opt);
    return {std::move(pairs.vectors), std::move(pairs.values), BasisKind::CenteredEigen};
}

namespace detail {
inline SpectralBasis to_svd_basis(EigenPairs pairs) {
    SpectralBasis b;
    b.kind = BasisKind::RawSvd;
    b.values = pairs.values.cwiseAbs();
    b.vectors = std::move(pairs.vectors);
    return b;
}
}  // namespace detail

/// Top-k singular triplets of a symmetric matrix: sigma = |lambda|, u = eigenvector.
inline SpectralBasis svd_sym_topk(const Matrix& m, std::size_t k, EigenOptions opt = {}) {
    if (m.rows() != m.cols()) throw Error("svd_sym_topk: matrix is not square");
    opt.order = EigenOrder::Magnitude;
    return detail::to_svd_basis(eig_topk(DenseSymOp(m), k, opt));
}

inline SpectralBasis svd_sym_topk(const DistanceMatrix& d, std::size_t k, EigenOptions opt = {}) {
    opt.order = EigenOrder::Magnitude;
    return detail::to_svd_basis(eig_topk(DistanceOp(d), k, opt));
}

/// Exponent applied to the eigenvalues in the centered embedding. +1/2 is classical
/// MDS (Z Z^T approximates G); -1/2 is available for textual fidelity.
enum class MdsExponent { PlusHalf, MinusHalf };

/// Eigenvalues at or below this fraction of the largest magnitude count as non-positive.
inline constexpr double kPositiveEigenTolerance = 1e-10;

inline std::size_t positive_count(const SpectralBasis& basis) {
    if (basis.rank() == 0) return 0;
    const double cut = kPositiveEigenTolerance * basis.values.cwiseAbs().maxCoeff();
    std::size_t c = 0;
    for (Eigen::Index i = 0; i < basis.values.size(); ++i) c += basis.values[i] > cut;
    return c;
}

/// Z = U_d L_d^(+-1/2) over the leading d strictly positive eigenvalues.
inline Embedding embed_centered(const SpectralBasis& basis, std::size_t d,
                                MdsExponent exponent = MdsExponent::PlusHalf) {
    if (basis.kind != BasisKind::CenteredEigen) throw Error("embed_centered needs a centered eigenbasis");
    const double cut = basis.rank() ? kPositiveEigenTolerance * basis.values.cwiseAbs().maxCoeff() : 0.0;
    Embedding e;
    e.variant = Variant::E5;
    e.coords.resize(basis.vectors.rows(), static_cast<Eigen::Index>(d));
    std::size_t c = 0;
    for (Eigen::Index i = 0; i < basis.values.size() && c < d; ++i) {
        const double lambda = basis.values[i];
        if (!(lambda > cut)) continue;
        const double scale = exponent == MdsExponent::PlusHalf ? std::sqrt(lambda) : 1.0 / std::sqrt(lambda);
        e.coords.col(static_cast<Eigen::Index>(c)) = basis.vectors.col(i) * scale;
        e.source_columns.push_back(static_cast<std::size_t>(i));
        e.values_used.push_back(lambda);
        ++c;
    }
    if (c < d)
        throw Error("embed_centered: requested " + std::to_string(d) + " dimensions but only " +
                    std::to_string(positive_count(basis)) + " positive eigenvalues");
    return e;
}

/// Z = U_d S_d.
inline Embedding embed_scaled(const SpectralBasis& basis, std::size_t d) {
    if (d > basis.rank()) throw Error("embed_scaled: d exceeds basis rank");
    Embedding e;
    e.variant = Variant::E1;
    e.coords = basis.vectors.leftCols(static_cast<Eigen::Index>(d)) *
               basis.values.head(static_cast<Eigen::Index>(d)).asDiagonal();
    for (std::size_t j = 0; j < d; ++j) {
        e.source_columns.push_back(j);
        e.values_used.push_back(basis.values[static_cast<Eigen::Index>(j)]);
    }
    return e;
}

/// Z = U_d.
inline Embedding embed_vectors(const SpectralBasis& basis, std::size_t d) {
    if (d > basis.rank()) throw Error("embed_vectors: d exceeds basis rank");
    Embedding e;
    e.variant = Variant::E3;
    e.coords = basis.vectors.leftCols(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        e.source_columns.push_back(j);
        e.values_used.push_back(basis.values[static_cast<Eigen::Index>(j)]);
    }
    return e;
}

struct RawEmbeddingOptions {
    std::size_t k = 100;
    MdsExponent exponent = MdsExponent::PlusHalf;
    EigenOptions eigen{};
};

/// Raw n x k embedding Z0 for E1 (U S), E3 (U) or E5 (isomap). k is clamped to n;
/// E5 is truncated to the number of positive eigenvalues.
inline Embedding build_raw_embedding(Variant variant, const DistanceMatrix& d, const RawEmbeddingOptions& opt = {}) {
    const std::size_t k = std::min(opt.k, d.size());
    Embedding e;
    switch (variant) {
        case Variant::E1: e = embed_scaled(svd_sym_topk(d, k, opt.eigen), k); break;
        case Variant::E3: e = embed_vectors(svd_sym_topk(d, k, opt.eigen), k); break;
        case Variant::E5: {
            SpectralBasis basis = centered_basis(d, k, opt.eigen);
            std::size_t usable = std::min(k, positive_count(basis));
            if (usable < k)
                info("isomap embedding truncated to " + std::to_string(usable) + " positive eigenvalues (requested " +
                     std::to_string(k) + ")");
            e = embed_centered(basis, usable, opt.exponent);
            break;
        }
        default: throw Error("build_raw_embedding: variant " + to_string(variant) + " has no raw embedding");
    }
    e.variant = variant;
    return e;
}

// ---------------------------------------------------------------------------
// embedding files: CSV body plus a key=value sidecar (<path>.meta)

inline void write_embedding(const Embedding& e, const std::vector<GeneId>& node_ids, const std::string& path) {
    if (node_ids.size() != e.rows()) throw Error("write_embedding: node id count does not match rows");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(17);
    out << "node_gene_id";
    for (auto c : e.source_columns) out << ",dim_" << c;
    out << '\n';
    for (std::size_t r = 0; r < e.rows(); ++r) {
        out << node_ids[r];
        for (std::size_t c = 0; c < e.dims(); ++c)
            out << ',' << e.coords(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        out << '\n';
    }
    std::ofstream meta(path + ".meta");
    if (!meta) throw Error("cannot write " + path + ".meta");
    meta.precision(17);
    meta << "variant_tag=" << to_string(e.variant) << '\n' << "seed=" << e.seed << '\n' << "values_used=";
    for (std::size_t i = 0; i < e.values_used.size(); ++i) meta << (i ? "," : "") << e.values_used[i];
    meta << '\n';
}

struct LoadedEmbedding {
    Embedding embedding;
    std::vector<GeneId> node_ids;
};

inline LoadedEmbedding read_embedding(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    LoadedEmbedding out;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
    {
        std::stringstream hs(line);
        std::string cell;
        std::getline(hs, cell, ',');
        while (std::getline(hs, cell, ',')) {
            if (cell.rfind("dim_", 0) != 0) throw ParseError(path, 1, "bad column name " + cell);
            out.embedding.source_columns.push_back(std::stoul(cell.substr(4)));
        }
    }
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        GeneId g = 0;
        if (!detail::parse_gene(cell, g)) throw ParseError(path, lineno, "bad gene id");
        out.node_ids.push_back(g);
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) {
            double v = 0;
            if (!detail::parse_real(cell, v))
                throw ParseError(path, lineno, "bad value " + cell);
            vals.push_back(v);
        }
        if (vals.size() != out.embedding.source_columns.size()) throw ParseError(path, lineno, "wrong column count");
        rows.push_back(std::move(vals));
    }
    auto& z = out.embedding.coords;
    z.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.embedding.source_columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];

    std::ifstream meta(path + ".meta");
    while (meta && std::getline(meta, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "variant_tag") out.embedding.variant = parse_variant(val);
        else if (key == "seed") out.embedding.seed = std::stoull(val);
        else if (key == "values_used") {
            std::stringstream vs(val);
            std::string cell;
            while (std::getline(vs, cell, ',')) {
                double v = 0;
                detail::parse_real(cell, v);
                out.embedding.values_used.push_back(v);
            }
        }
    }
    if (out.embedding.values_used.size() != out.embedding.source_columns.size())
        out.embedding.values_used.assign(out.embedding.source_columns.size(), 0.0);
    return out;
}

}  // namespace bse
