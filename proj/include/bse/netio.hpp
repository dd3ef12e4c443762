#pragma once

// Loaders for the interactome, disease-gene and relative-risk tables, the
// largest-connected-component restriction, and comorbidity labelling.
//
// All three inputs are tab-separated text, one record per row. Lines that are
// empty or start with '#' are skipped.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"

namespace bse {

using GeneId = std::uint64_t;
using NodeIndex = std::uint32_t;
inline constexpr NodeIndex kNoIndex = static_cast<NodeIndex>(-1);

/// Undirected, unweighted interaction graph. Node i carries gene node_ids[i];
/// node_ids is strictly increasing and defines the canonical index order.
struct InteractomeGraph {
    std::vector<GeneId> node_ids;
    std::vector<std::vector<NodeIndex>> adjacency;  // sorted, no self loops, no duplicates
    std::size_t edge_count = 0;

    std::size_t size() const { return node_ids.size(); }

    /// Index of a gene, or kNoIndex if the gene is not a node.
    NodeIndex index_of(GeneId gene) const {
        auto it = std::lower_bound(node_ids.begin(), node_ids.end(), gene);
        if (it == node_ids.end() || *it != gene) return kNoIndex;
        return static_cast<NodeIndex>(it - node_ids.begin());
    }

    /// Builds a graph from gene-ID edges. Self loops keep their node but add no edge.
    static InteractomeGraph from_edges(const std::vector<std::pair<GeneId, GeneId>>& edges,
                                       std::size_t* self_loops = nullptr,
                                       std::size_t* duplicates = nullptr);
};

struct EdgeListStats {
    std::size_t rows = 0;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
};

/// Disease -> associated genes. Diseases keep first-appearance order; each gene
/// set is sorted and duplicate-free.
struct DiseaseGeneMap {
    std::vector<std::string> diseases;
    std::vector<std::vector<GeneId>> gene_sets;

    std::size_t size() const { return diseases.size(); }

    std::size_t index_of(const std::string& disease) const {
        auto it = lookup_.find(disease);
        return it == lookup_.end() ? npos : it->second;
    }
    bool contains(const std::string& disease) const { return index_of(disease) != npos; }

    void add(const std::string& disease, GeneId gene) {
        auto [it, inserted] = lookup_.try_emplace(disease, diseases.size());
        if (inserted) {
            diseases.push_back(disease);
            gene_sets.emplace_back();
        }
        auto& set = gene_sets[it->second];
        auto pos = std::lower_bound(set.begin(), set.end(), gene);
        if (pos == set.end() || *pos != gene) set.insert(pos, gene);
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::unordered_map<std::string, std::size_t> lookup_;
};

struct RRRow {
    std::string disease_a;
    std::string disease_b;
    double rr = 0.0;
};

struct RRTable {
    std::vector<RRRow> rows;
};

struct LabeledPair {
    std::string disease_a;
    std::string disease_b;
    int label = 0;
    double rr = 0.0;
};

struct LabeledPairs {
    double threshold = 0.0;
    std::vector<LabeledPair> pairs;
    double positive_fraction = 0.0;

    std::size_t positives() const {
        std::size_t c = 0;
        for (const auto& p : pairs) c += p.label == 1;
        return c;
    }
};

/// Disease gene sets restricted to LCC nodes, stored as ascending node indices.
struct LccDiseaseSets {
    std::vector<std::string> diseases;
    std::vector<std::vector<NodeIndex>> members;
    std::vector<std::size_t> excluded;  // genes dropped per disease (not in the LCC)
    std::unordered_map<std::string, std::size_t> lookup;

    const std::vector<NodeIndex>* find(const std::string& disease) const {
        auto it = lookup.find(disease);
        return it == lookup.end() ? nullptr : &members[it->second];
    }
};

// ---------------------------------------------------------------------------

namespace detail {

inline bool skip_line(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \r");
    return s.substr(b, e - b + 1);
}

inline bool parse_gene(const std::string& text, GeneId& out) {
    std::string t = trim(text);
    if (t.empty()) return false;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size() && out > 0;
}

inline bool parse_real(const std::string& text, double& out) {
    std::string t = trim(text);
    if (t.empty()) return false;
    std::istringstream in(t);
    in.imbue(std::locale::classic());
    in >> out;
    return !in.fail() && in.eof();
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

}  // namespace detail

inline InteractomeGraph InteractomeGraph::from_edges(const std::vector<std::pair<GeneId, GeneId>>& edges,
                                                     std::size_t* self_loops, std::size_t* duplicates) {
    InteractomeGraph g;
    for (const auto& [a, b] : edges) {
        g.node_ids.push_back(a);
        g.node_ids.push_back(b);
    }
    std::sort(g.node_ids.begin(), g.node_ids.end());
    g.node_ids.erase(std::unique(g.node_ids.begin(), g.node_ids.end()), g.node_ids.end());
    g.adjacency.assign(g.node_ids.size(), {});

    std::size_t loops = 0;
    for (const auto& [a, b] : edges) {
        if (a == b) {
            ++loops;
            continue;
        }
        NodeIndex i = g.index_of(a), j = g.index_of(b);
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
    }
    std::size_t half_edges = 0;
    for (auto& nbrs : g.adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        half_edges += nbrs.size();
    }
    g.edge_count = half_edges / 2;
    if (self_loops) *self_loops = loops;
    if (duplicates) *duplicates = edges.size() - loops - g.edge_count;
    return g;
}

/// Reads `gene_a<TAB>gene_b` rows. Duplicate and reversed rows collapse; self loops
/// are dropped with a warning (the node itself is kept).
inline InteractomeGraph load_edge_list(const std::string& path, EdgeListStats* stats = nullptr) {
    auto in = detail::open_input(path);
    std::vector<std::pair<GeneId, GeneId>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skip_line(line)) continue;
        auto fields = detail::split_tabs(line);
        GeneId a = 0, b = 0;
        if (fields.size() != 2 || !detail::parse_gene(fields[0], a) || !detail::parse_gene(fields[1], b))
            throw ParseError(path, lineno, "expected two positive integer gene IDs separated by a tab");
        edges.emplace_back(a, b);
    }
    if (edges.empty()) throw Error(path + ": edge list contains no data rows");

    EdgeListStats st;
    st.rows = edges.size();
    InteractomeGraph g = InteractomeGraph::from_edges(edges, &st.self_loops, &st.duplicates);
    if (st.self_loops > 0) warn(path + ": dropped " + std::to_string(st.self_loops) + " self-loop row(s)");
    if (stats) *stats = st;
    return g;
}

/// Writes the graph as an edge list (each edge once, smaller index first).
inline void write_edge_list(const InteractomeGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "#gene_a\tgene_b\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        for (NodeIndex j : g.adjacency[i])
            if (j > i) out << g.node_ids[i] << '\t' << g.node_ids[j] << '\n';
    // isolated nodes (from dropped self loops) survive as self-loop rows
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.adjacency[i].empty()) out << g.node_ids[i] << '\t' << g.node_ids[i] << '\n';
}

/// Connected component id per node; components numbered in order of their smallest node index.
inline std::vector<std::size_t> connected_components(const InteractomeGraph& g, std::size_t* count = nullptr) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> comp(g.size(), unset);
    std::vector<NodeIndex> queue;
    std::size_t next = 0;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (comp[s] != unset) continue;
        comp[s] = next;
        queue.assign(1, static_cast<NodeIndex>(s));
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (NodeIndex v : g.adjacency[queue[h]])
                if (comp[v] == unset) {
                    comp[v] = next;
                    queue.push_back(v);
                }
        ++next;
    }
    if (count) *count = next;
    return comp;
}

inline bool is_connected(const InteractomeGraph& g) {
    std::size_t count = 0;
    connected_components(g, &count);
    return count <= 1;
}

struct LccResult {
    InteractomeGraph graph;
    std::vector<NodeIndex> old_to_new;  // kNoIndex for nodes outside the component
};

/// Largest connected component. Ties go to the component holding the smallest gene ID.
inline LccResult largest_connected_component(const InteractomeGraph& g) {
    if (g.size() == 0) throw Error("largest_connected_component: empty graph");
    std::size_t count = 0;
    auto comp = connected_components(g, &count);
    std::vector<std::size_t> sizes(count, 0);
    for (auto c : comp) ++sizes[c];
    // component ids are ordered by smallest node index, i.e. smallest gene ID,
    // so the first maximum wins ties
    std::size_t best = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

    LccResult r;
    r.old_to_new.assign(g.size(), kNoIndex);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (comp[i] == best) {
            r.old_to_new[i] = static_cast<NodeIndex>(r.graph.node_ids.size());
            r.graph.node_ids.push_back(g.node_ids[i]);
        }
    r.graph.adjacency.resize(r.graph.node_ids.size());
    std::size_t half_edges = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (comp[i] != best) continue;
        auto& nbrs = r.graph.adjacency[r.old_to_new[i]];
        for (NodeIndex j : g.adjacency[i]) nbrs.push_back(r.old_to_new[j]);
        half_edges += nbrs.size();
    }
    r.graph.edge_count = half_edges / 2;
    return r;
}

/// Reads `disease_name<TAB>gene_id` rows.
inline DiseaseGeneMap load_disease_genes(const std::string& path) {
    auto in = detail::open_input(path);
    DiseaseGeneMap map;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skip_line(line)) continue;
        auto fields = detail::split_tabs(line);
        GeneId gene = 0;
        if (fields.size() != 2 || detail::trim(fields[0]).empty())
            throw ParseError(path, lineno, "expected disease_name<TAB>gene_id");
        if (!detail::parse_gene(fields[1], gene))
            throw ParseError(path, lineno, "gene_id '" + fields[1] + "' is not a positive integer");
        map.add(detail::trim(fields[0]), gene);
    }
    if (map.size() == 0) warn(path + ": no disease-gene associations");
    return map;
}

inline void write_disease_genes(const DiseaseGeneMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "#disease\tgene_id\n";
    for (std::size_t d = 0; d < map.size(); ++d)
        for (GeneId g : map.gene_sets[d]) out << map.diseases[d] << '\t' << g << '\n';
}

/// Reads `disease_a<TAB>disease_b<TAB>rr` rows. When `diseases` is given, every
/// disease must appear in it. Duplicate unordered pairs are rejected.
inline RRTable load_rr_table(const std::string& path, const DiseaseGeneMap* diseases = nullptr) {
    auto in = detail::open_input(path);
    RRTable table;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skip_line(line)) continue;
        auto fields = detail::split_tabs(line);
        RRRow row;
        if (fields.size() != 3) throw ParseError(path, lineno, "expected disease_a<TAB>disease_b<TAB>rr");
        row.disease_a = detail::trim(fields[0]);
        row.disease_b = detail::trim(fields[1]);
        if (!detail::parse_real(fields[2], row.rr) || !(row.rr >= 0.0))
            throw ParseError(path, lineno, "rr value '" + fields[2] + "' is not a non-negative decimal");
        if (diseases) {
            for (const auto* name : {&row.disease_a, &row.disease_b})
                if (!diseases->contains(*name))
                    throw ParseError(path, lineno, "unknown disease '" + *name + "'");
        }
        auto key = std::minmax(row.disease_a, row.disease_b);
        if (!seen.emplace(key.first, key.second).second)
            throw ParseError(path, lineno, "duplicate disease pair " + row.disease_a + " / " + row.disease_b);
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline void write_rr_table(const RRTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(17);
    out << "#disease_a\tdisease_b\trr\n";
    for (const auto& r : table.rows) out << r.disease_a << '\t' << r.disease_b << '\t' << r.rr << '\n';
}

/// label = 1 iff rr > threshold (strict).
inline LabeledPairs label_pairs(const RRTable& rr, double threshold) {
    LabeledPairs out;
    out.threshold = threshold;
    out.pairs.reserve(rr.rows.size());
    for (const auto& r : rr.rows) out.pairs.push_back({r.disease_a, r.disease_b, r.rr > threshold ? 1 : 0, r.rr});
    out.positive_fraction =
        out.pairs.empty() ? 0.0 : static_cast<double>(out.positives()) / static_cast<double>(out.pairs.size());
    return out;
}

/// Restricts every disease's gene set to LCC members, logging per-disease exclusions.
inline LccDiseaseSets restrict_to_lcc(const DiseaseGeneMap& map, const InteractomeGraph& lcc) {
    LccDiseaseSets out;
    out.diseases = map.diseases;
    out.members.resize(map.size());
    out.excluded.assign(map.size(), 0);
    for (std::size_t d = 0; d < map.size(); ++d) {
        out.lookup.emplace(map.diseases[d], d);
        for (GeneId g : map.gene_sets[d]) {
            NodeIndex idx = lcc.index_of(g);
            if (idx == kNoIndex)
                ++out.excluded[d];
            else
                out.members[d].push_back(idx);
        }
        std::sort(out.members[d].begin(), out.members[d].end());
        if (out.excluded[d] > 0)
            info(map.diseases[d] + ": " + std::to_string(out.excluded[d]) + " gene(s) outside the LCC excluded");
    }
    return out;
}

/// Drops pairs where either disease is unknown or has no LCC genes; returns the drop count.
inline std::size_t drop_empty_pairs(LabeledPairs& labels, const LccDiseaseSets& sets) {
    auto usable = [&](const std::string& d) {
        const auto* m = sets.find(d);
        return m && !m->empty();
    };
    std::size_t before = labels.pairs.size();
    std::erase_if(labels.pairs, [&](const LabeledPair& p) { return !usable(p.disease_a) || !usable(p.disease_b); });
    std::size_t dropped = before - labels.pairs.size();
    labels.positive_fraction = labels.pairs.empty() ? 0.0
                                                    : static_cast<double>(labels.positives()) /
                                                          static_cast<double>(labels.pairs.size());
    if (dropped > 0)
        warn("dropped " + std::to_string(dropped) + " disease pair(s) with an empty LCC gene set");
    return dropped;
}

}  // namespace bse
