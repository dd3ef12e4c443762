#pragma once

// Post-hoc analyses of selected dimensions: top genes per dimension with their
// disease-association counts and degrees, the ratio R = sum(s) / sum(d), paired
// select-vs-rank statistics, union-dimension scores, and CSV/SVG reports.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bse.hpp"
#include "common.hpp"
#include "graphdist.hpp"
#include "netio.hpp"
#include "spectral.hpp"
#include "svm.hpp"

namespace bse {

enum class Ranking { Absolute, Signed };

inline std::string to_string(Ranking r) { return r == Ranking::Signed ? "signed" : "absolute"; }

inline Ranking parse_ranking(const std::string& s) {
    if (s == "absolute") return Ranking::Absolute;
    if (s == "signed") return Ranking::Signed;
    throw Error("unknown ranking rule '" + s + "' (expected absolute or signed)");
}

struct TopGeneCell {
    std::size_t dim_position = 0;  // position in the requested dimension list
    std::size_t source_column = 0;
    std::size_t value_rank = 0;    // 1-based rank of the column's basis value
    std::size_t rank = 0;          // 1..N within the dimension
    GeneId gene = 0;
    double value = 0.0;
    std::size_t disease_count = 0;
    std::size_t degree = 0;
};

struct TopGeneTable {
    Ranking ranking = Ranking::Absolute;
    std::size_t n_top = 0;
    std::vector<std::size_t> dims;  // source columns
    std::vector<TopGeneCell> cells; // dimension-major
    bool annotated = false;
};

/// For each requested source column, the N genes with the largest value (or |value|).
/// Ties go to the lower gene ID.
inline TopGeneTable top_genes(const Embedding& z, std::span<const GeneId> node_ids, std::span<const std::size_t> dims,
                              std::size_t n_top = 20, Ranking ranking = Ranking::Absolute) {
    if (node_ids.size() != z.rows()) throw Error("top_genes: node id count does not match embedding rows");
    if (n_top > z.rows())
        throw Error("top_genes: N=" + std::to_string(n_top) + " exceeds " + std::to_string(z.rows()) + " genes");
    std::vector<std::size_t> value_rank(z.dims(), 0);
    if (z.values_used.size() == z.dims()) {
        auto order = rank_select(z.values_used, z.dims());
        for (std::size_t r = 0; r < order.size(); ++r) value_rank[order[r]] = r + 1;
    }

    TopGeneTable t;
    t.ranking = ranking;
    t.n_top = n_top;
    t.dims.assign(dims.begin(), dims.end());
    std::vector<std::size_t> idx(z.rows());
    for (std::size_t p = 0; p < dims.size(); ++p) {
        auto it = std::find(z.source_columns.begin(), z.source_columns.end(), dims[p]);
        if (it == z.source_columns.end()) throw Error("top_genes: column " + std::to_string(dims[p]) + " not in embedding");
        const auto pos = static_cast<std::size_t>(it - z.source_columns.begin());
        const auto col = z.coords.col(static_cast<Eigen::Index>(pos));
        auto key = [&](std::size_t r) {
            const double v = col[static_cast<Eigen::Index>(r)];
            return ranking == Ranking::Absolute ? std::abs(v) : v;
        };
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_top), idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double ka = key(a), kb = key(b);
                              if (ka != kb) return ka > kb;
                              return node_ids[a] < node_ids[b];
                          });
        for (std::size_t r = 0; r < n_top; ++r)
            t.cells.push_back({p, dims[p], value_rank[pos], r + 1, node_ids[idx[r]], col[static_cast<Eigen::Index>(idx[r])]});
    }
    return t;
}

/// Fills disease counts (number of disease sets containing the gene) and LCC degrees.
inline void annotate(TopGeneTable& t, const DiseaseGeneMap& map, const InteractomeGraph& lcc,
                     const DegreeVector& degrees) {
    if (degrees.size() != lcc.size()) throw Error("annotate: degree vector does not match the graph");
    for (auto& c : t.cells) {
        const NodeIndex v = lcc.index_of(c.gene);
        if (v == kNoIndex) throw Error("annotate: gene " + std::to_string(c.gene) + " is not in the component");
        c.degree = degrees[v];
        c.disease_count = 0;
        for (const auto& set : map.gene_sets)
            if (std::binary_search(set.begin(), set.end(), c.gene)) ++c.disease_count;
    }
    t.annotated = true;
}

/// R = sum of disease counts / sum of degrees over every cell (repeated genes count again).
inline double ratio_R(const TopGeneTable& t) {
    if (t.cells.empty()) throw Error("ratio_R: empty table");
    if (!t.annotated) throw Error("ratio_R: table is not annotated");
    double s = 0, d = 0;
    for (const auto& c : t.cells) {
        s += static_cast<double>(c.disease_count);
        d += static_cast<double>(c.degree);
    }
    if (d == 0) throw Error("ratio_R: zero degree total");
    return s / d;
}

struct DimensionTotals {
    std::size_t source_column = 0;
    std::size_t disease_total = 0;
    std::size_t degree_total = 0;
};

inline std::vector<DimensionTotals> dimension_totals(const TopGeneTable& t) {
    std::vector<DimensionTotals> out;
    for (std::size_t p = 0; p < t.dims.size(); ++p) out.push_back({t.dims[p], 0, 0});
    for (const auto& c : t.cells) {
        out[c.dim_position].disease_total += c.disease_count;
        out[c.dim_position].degree_total += c.degree;
    }
    return out;
}

// ---------------------------------------------------------------------------
// paired comparison

inline constexpr const char* kComparisonTest = "paired two-sided t-test";

struct MetricComparison {
    std::string metric;
    double mean_select = 0.0;
    double mean_rank = 0.0;
    double t = 0.0;
    double p_value = 1.0;
    double std_diff = 0.0;   // sample std of select - rank
    bool degenerate = false; // nonzero constant difference: p is below resolution
};

struct ComparisonStats {
    std::vector<MetricComparison> metrics;
    std::string test = kComparisonTest;
};

/// Paired two-sided t-test of one vector of per-fold values against another.
inline MetricComparison paired_t_test(std::span<const double> select, std::span<const double> rank) {
    if (select.size() != rank.size()) throw Error("paired test: fold counts differ");
    const std::size_t n = select.size();
    if (n < 2) throw Error("paired test: need at least two folds");
    MetricComparison c;
    double ms = 0, mr = 0, md = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ms += select[i];
        mr += rank[i];
        md += select[i] - rank[i];
    }
    const double nn = static_cast<double>(n);
    ms /= nn;
    mr /= nn;
    md /= nn;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += (select[i] - rank[i] - md) * (select[i] - rank[i] - md);
    c.mean_select = ms;
    c.mean_rank = mr;
    c.std_diff = std::sqrt(ss / (nn - 1));
    // spread at rounding level: treat the differences as constant
    if (c.std_diff <= 1e-12 * std::abs(md) || c.std_diff == 0.0) {
        if (md == 0.0) {
            c.t = 0.0;
            c.p_value = 1.0;
        } else {
            c.t = md > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            c.p_value = 0.0;
            c.degenerate = true;
        }
        return c;
    }
    c.t = md / (c.std_diff / std::sqrt(nn));
    boost::math::students_t dist(nn - 1);
    c.p_value = std::min(1.0, 2.0 * boost::math::cdf(dist, -std::abs(c.t)));
    return c;
}

inline ComparisonStats compare_methods(const std::vector<MetricSet>& select, const std::vector<MetricSet>& rank) {
    if (select.size() != rank.size())
        throw Error("compare_methods: " + std::to_string(select.size()) + " select folds vs " +
                    std::to_string(rank.size()) + " rank folds");
    ComparisonStats out;
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        std::vector<double> a, b;
        for (std::size_t f = 0; f < select.size(); ++f) {
            a.push_back(metric_value(select[f], m));
            b.push_back(metric_value(rank[f], m));
        }
        MetricComparison c = paired_t_test(a, b);
        c.metric = kMetricNames[m];
        out.metrics.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// dimensions shared across folds

/// The m columns chosen most often across folds; ties by earlier mean position, then lower index.
inline std::vector<std::size_t> first_m_by_frequency(const std::vector<SelectionResult>& selections, std::size_t m) {
    struct Tally {
        std::size_t count = 0;
        double position_sum = 0;
    };
    std::map<std::size_t, Tally> tally;
    for (const auto& s : selections)
        for (std::size_t p = 0; p < s.selected.size(); ++p) {
            auto& t = tally[s.selected[p]];
            ++t.count;
            t.position_sum += static_cast<double>(p);
        }
    if (tally.size() < m)
        throw Error("first_m_by_frequency: only " + std::to_string(tally.size()) + " distinct columns for m=" +
                    std::to_string(m));
    std::vector<std::pair<std::size_t, Tally>> items(tally.begin(), tally.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        const double pa = a.second.position_sum / static_cast<double>(a.second.count);
        const double pb = b.second.position_sum / static_cast<double>(b.second.count);
        return pa < pb;
    });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i) out.push_back(items[i].first);
    return out;
}

/// Outer-fold evaluation with a fixed union of columns.
inline MetricSummary union_dim_scores(const PairDataset& ds, std::span<const std::size_t> columns, const FoldPlan& plan,
                                      const SvmParams& svm, std::vector<MetricSet>* folds = nullptr) {
    auto f = evaluate_fixed_columns(ds, columns, plan, svm);
    MetricSummary s = summarize(f);
    if (folds) *folds = std::move(f);
    return s;
}

// ---------------------------------------------------------------------------
// reports

namespace detail {
inline std::ofstream open_report(const std::string& path, const std::string& preamble) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << preamble;
    out.precision(10);
    return out;
}
}  // namespace detail

/// metric, <rank>, <select>, p_val, std  (one row per metric)
inline void write_comparison_csv(const ComparisonStats& c, const std::string& rank_label,
                                 const std::string& select_label, const std::string& path,
                                 const std::string& preamble = {}) {
    auto out = detail::open_report(path, preamble);
    out << "# test: " << c.test << '\n';
    out << "metric," << rank_label << ',' << select_label << ",p_val,std,degenerate\n";
    for (const auto& m : c.metrics)
        out << m.metric << ',' << m.mean_rank << ',' << m.mean_select << ',' << m.p_value << ',' << m.std_diff << ','
            << (m.degenerate ? 1 : 0) << '\n';
}

inline void write_summary_csv(const MetricSummary& s, const std::string& label, const std::string& path,
                              const std::string& preamble = {}) {
    auto out = detail::open_report(path, preamble);
    out << "metric," << label << "_mean," << label << "_std\n";
    for (std::size_t m = 0; m < kMetricNames.size(); ++m)
        out << kMetricNames[m] << ',' << metric_value(s.mean, m) << ',' << metric_value(s.std, m) << '\n';
}

inline void write_top_genes_csv(const TopGeneTable& t, const std::string& path, const std::string& preamble = {}) {
    auto out = detail::open_report(path, preamble);
    out << "# ranking: " << to_string(t.ranking) << '\n';
    out << "dim_position,source_column,value_rank,rank,gene_id,value,disease_count,degree\n";
    for (const auto& c : t.cells)
        out << c.dim_position << ',' << c.source_column << ',' << c.value_rank << ',' << c.rank << ',' << c.gene << ','
            << c.value << ',' << c.disease_count << ',' << c.degree << '\n';
}

inline void write_dimension_totals_csv(const std::vector<DimensionTotals>& totals, const std::string& path,
                                       const std::string& preamble = {}) {
    auto out = detail::open_report(path, preamble);
    out << "source_column,disease_total,degree_total\n";
    for (const auto& d : totals) out << d.source_column << ',' << d.disease_total << ',' << d.degree_total << '\n';
}

struct RatioRow {
    std::string method;
    std::string dataset;
    double r_select = 0.0;
    double r_rank = 0.0;
};

inline void write_ratio_csv(const std::vector<RatioRow>& rows, const std::string& path,
                            const std::string& preamble = {}) {
    auto out = detail::open_report(path, preamble);
    out << "method,dataset,R_select,R_rank\n";
    for (const auto& r : rows) out << r.method << ',' << r.dataset << ',' << r.r_select << ',' << r.r_rank << '\n';
}

inline void write_prefix_curve_csv(const std::vector<MetricSet>& curve, const std::string& path,
                                   const std::string& preamble = {}) {
    auto out = detail::open_report(path, preamble);
    out << "dims";
    for (auto n : kMetricNames) out << ',' << n;
    out << '\n';
    for (std::size_t p = 0; p < curve.size(); ++p) {
        out << p + 1;
        for (std::size_t m = 0; m < kMetricNames.size(); ++m) out << ',' << metric_value(curve[p], m);
        out << '\n';
    }
}

/// Heatmap of disease counts: one column per dimension, one row per rank.
inline void write_top_genes_svg(const TopGeneTable& t, const std::string& path, const std::string& title = {}) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    constexpr int cell = 18, left = 40, top = 40;
    const int w = left + cell * static_cast<int>(t.dims.size()) + 20;
    const int h = top + cell * static_cast<int>(t.n_top) + 20;
    std::size_t max_count = 1;
    for (const auto& c : t.cells) max_count = std::max(max_count, c.disease_count);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"9\">\n";
    if (!title.empty()) out << "<text x=\"" << left << "\" y=\"14\" font-size=\"11\">" << title << "</text>\n";
    for (std::size_t p = 0; p < t.dims.size(); ++p)
        out << "<text x=\"" << left + cell * static_cast<int>(p) + 3 << "\" y=\"" << top - 4 << "\">" << t.dims[p]
            << "</text>\n";
    for (const auto& c : t.cells) {
        const int x = left + cell * static_cast<int>(c.dim_position);
        const int y = top + cell * static_cast<int>(c.rank - 1);
        const int shade = 255 - static_cast<int>(200.0 * static_cast<double>(c.disease_count) / static_cast<double>(max_count));
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
            << shade << ',' << shade << ",255)\" stroke=\"#ccc\"/>";
        if (c.disease_count)
            out << "<text x=\"" << x + 5 << "\" y=\"" << y + 12 << "\">" << c.disease_count << "</text>";
        out << '\n';
    }
    for (std::size_t r = 1; r <= t.n_top; ++r)
        out << "<text x=\"4\" y=\"" << top + cell * static_cast<int>(r - 1) + 12 << "\">" << r << "</text>\n";
    out << "</svg>\n";
}

/// Line chart of mean AUC against the number of dimensions used.
inline void write_prefix_curve_svg(const std::vector<std::pair<std::string, std::vector<MetricSet>>>& series,
                                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    constexpr int w = 420, h = 260, pad = 36;
    std::size_t len = 1;
    for (const auto& s : series) len = std::max(len, s.second.size());
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - 10 << "\" y2=\"" << h - pad
        << "\" stroke=\"black\"/><line x1=\"" << pad << "\" y1=\"10\" x2=\"" << pad << "\" y2=\"" << h - pad
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"4\" y=\"14\">1.0</text><text x=\"4\" y=\"" << h - pad << "\">0.5</text>\n";
    auto px = [&](std::size_t i) { return pad + (len > 1 ? static_cast<double>(i) * (w - pad - 10) / static_cast<double>(len - 1) : 0.0); };
    auto py = [&](double auc) { return (h - pad) - (std::clamp(auc, 0.5, 1.0) - 0.5) * 2.0 * (h - pad - 10); };
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (std::size_t i = 0; i < series[s].second.size(); ++i) {
            const double auc = series[s].second[i].roc_auc;
            out << px(i) << ',' << py(std::isnan(auc) ? 0.5 : auc) << ' ';
        }
        out << "\"/>\n<text x=\"" << w - 90 << "\" y=\"" << 20 + 12 * static_cast<int>(s) << "\" fill=\"" << color
            << "\">" << series[s].first << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace bse
