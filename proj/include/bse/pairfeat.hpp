#pragma once

// Disease features are column sums of the embedding over the disease's genes;
// a pair sample is the concatenation [F_a | F_b].

#include <Eigen/Dense>

#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "netio.hpp"
#include "spectral.hpp"

namespace bse {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DiseaseFeature {
    std::string disease;
    Vector values;
};

enum class Slot { A, B };

struct ColumnOrigin {
    Slot slot = Slot::A;
    std::size_t source_column = 0;
    friend bool operator==(const ColumnOrigin&, const ColumnOrigin&) = default;
};

/// Pair samples, one row per retained disease pair.
struct PairDataset {
    RowMatrix features;                  // samples x 2m
    std::vector<int> labels;             // 0/1
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<ColumnOrigin> column_origin;

    std::size_t samples() const { return labels.size(); }
    std::size_t width() const { return column_origin.size(); }

    /// Distinct source columns in first-appearance order of the A slot.
    std::vector<std::size_t> source_columns() const {
        std::vector<std::size_t> out;
        for (const auto& o : column_origin)
            if (o.slot == Slot::A) out.push_back(o.source_column);
        return out;
    }
};

enum class PairOrientation { FileOrder, Canonical };

/// Column sums of Z over the given rows, accumulated in ascending row order.
inline DiseaseFeature disease_feature(const Embedding& z, std::span<const NodeIndex> genes,
                                      const std::string& disease = {}) {
    if (genes.empty()) throw Error("disease_feature: empty gene set" + (disease.empty() ? "" : " for " + disease));
    std::vector<NodeIndex> sorted(genes.begin(), genes.end());
    std::sort(sorted.begin(), sorted.end());
    DiseaseFeature f{disease, Vector::Zero(z.coords.cols())};
    for (NodeIndex g : sorted) {
        if (g >= z.rows()) throw Error("disease_feature: gene index out of range");
        f.values += z.coords.row(static_cast<Eigen::Index>(g)).transpose();
    }
    return f;
}

/// One sample per labelled pair, in file order. Every disease must have LCC genes
/// (see drop_empty_pairs).
inline PairDataset assemble_dataset(const Embedding& z, const LccDiseaseSets& sets, const LabeledPairs& labels,
                                    PairOrientation orientation = PairOrientation::FileOrder) {
    const auto m = static_cast<Eigen::Index>(z.dims());
    std::unordered_map<std::string, Vector> cache;
    auto feature_of = [&](const std::string& d) -> const Vector& {
        auto it = cache.find(d);
        if (it != cache.end()) return it->second;
        const auto* genes = sets.find(d);
        if (!genes) throw Error("assemble_dataset: unknown disease " + d);
        return cache.emplace(d, disease_feature(z, *genes, d).values).first->second;
    };

    PairDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(labels.pairs.size()), 2 * m);
    for (Slot s : {Slot::A, Slot::B})
        for (auto c : z.source_columns) ds.column_origin.push_back({s, c});
    for (std::size_t i = 0; i < labels.pairs.size(); ++i) {
        const auto& p = labels.pairs[i];
        std::string a = p.disease_a, b = p.disease_b;
        if (orientation == PairOrientation::Canonical && b < a) std::swap(a, b);
        const auto r = static_cast<Eigen::Index>(i);
        ds.features.row(r).head(m) = feature_of(a).transpose();
        ds.features.row(r).tail(m) = feature_of(b).transpose();
        ds.labels.push_back(p.label);
        ds.pairs.emplace_back(a, b);
    }
    return ds;
}

/// Feature positions holding the given source columns (both slots, original relative order).
inline std::vector<std::size_t> coordinate_positions(const PairDataset& ds, std::span<const std::size_t> columns) {
    std::vector<char> wanted_found(columns.size(), 0);
    std::vector<std::size_t> pos;
    for (std::size_t p = 0; p < ds.column_origin.size(); ++p) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (ds.column_origin[p].source_column == columns[c]) {
                pos.push_back(p);
                wanted_found[c] = 1;
                break;
            }
    }
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (!wanted_found[c]) throw Error("select_coordinates: unknown column " + std::to_string(columns[c]));
    return pos;
}

/// Restricts every sample to the coordinates of the given embedding columns.
inline PairDataset select_coordinates(const PairDataset& ds, std::span<const std::size_t> columns) {
    auto pos = coordinate_positions(ds, columns);
    PairDataset out;
    out.labels = ds.labels;
    out.pairs = ds.pairs;
    out.features.resize(ds.features.rows(), static_cast<Eigen::Index>(pos.size()));
    for (std::size_t c = 0; c < pos.size(); ++c) {
        out.features.col(static_cast<Eigen::Index>(c)) = ds.features.col(static_cast<Eigen::Index>(pos[c]));
        out.column_origin.push_back(ds.column_origin[pos[c]]);
    }
    return out;
}

inline void write_dataset_csv(const PairDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(17);
    out << "disease_a,disease_b,label";
    for (std::size_t c = 0; c < ds.width(); ++c) out << ",f_" << c;
    out << '\n';
    for (std::size_t i = 0; i < ds.samples(); ++i) {
        out << ds.pairs[i].first << ',' << ds.pairs[i].second << ',' << ds.labels[i];
        for (std::size_t c = 0; c < ds.width(); ++c)
            out << ',' << ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        out << '\n';
    }
}

}  // namespace bse
