#pragma once

// Desk-scale synthetic benchmarks: a random interactome, localized disease
// modules, and relative-risk values that depend on how close two modules are.

#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "common.hpp"
#include "graphdist.hpp"
#include "netio.hpp"

namespace bse {

enum class EdgeModel { PreferentialAttachment, ErdosRenyi };
enum class AnchorRule { Any, LowDegree };

struct SynthConfig {
    std::size_t n = 500;
    EdgeModel model = EdgeModel::PreferentialAttachment;
    std::size_t attach = 2;    // edges per new node (preferential attachment)
    double edge_prob = 0.01;   // Erdos-Renyi
    std::size_t n_diseases = 40;
    std::size_t genes_min = 5;
    std::size_t genes_max = 15;
    double tau = 0.0;       // rr = 2 below this mean cross-module distance; <= 0 picks the median
    double tau_zero = 0.0;  // rr = 0 at or above this distance; <= 0 picks the 75th percentile
    double epsilon = 0.1;   // probability of moving a pair to the other side of rr = 1
    AnchorRule anchors = AnchorRule::Any;
    GeneId gene_id_offset = 1000;
    std::uint64_t seed = 1;

    void validate() const {
        if (n < 50) throw Error("synth: n must be at least 50");
        if (!(epsilon >= 0.0 && epsilon < 0.5)) throw Error("synth: epsilon must lie in [0, 0.5)");
        if (genes_min < 1 || genes_max < genes_min) throw Error("synth: invalid genes-per-disease range");
        if (n_diseases < 2) throw Error("synth: need at least two diseases");
        if (model == EdgeModel::PreferentialAttachment && (attach < 1 || attach + 1 > n))
            throw Error("synth: invalid attachment parameter");
        if (model == EdgeModel::ErdosRenyi && !(edge_prob > 0.0 && edge_prob <= 1.0))
            throw Error("synth: edge probability must lie in (0, 1]");
    }
};

struct SynthBenchmark {
    InteractomeGraph graph;
    DiseaseGeneMap diseases;
    RRTable rr;
    std::vector<double> mean_distance;  // per RR row
    double tau = 0.0;
    double tau_zero = 0.0;
};

namespace detail {

inline std::vector<std::pair<GeneId, GeneId>> preferential_attachment(const SynthConfig& cfg, Rng& rng) {
    std::vector<std::pair<GeneId, GeneId>> edges;
    std::vector<std::size_t> endpoints;  // node repeated once per incident edge
    const std::size_t m0 = cfg.attach + 1;
    for (std::size_t i = 0; i < m0; ++i)
        for (std::size_t j = i + 1; j < m0; ++j) {
            edges.emplace_back(i, j);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    std::vector<std::size_t> chosen;
    for (std::size_t v = m0; v < cfg.n; ++v) {
        chosen.clear();
        while (chosen.size() < cfg.attach) {
            std::size_t t = endpoints[uniform_index(rng, endpoints.size())];
            if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
        }
        for (std::size_t t : chosen) {
            edges.emplace_back(t, v);
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
    return edges;
}

inline std::vector<std::pair<GeneId, GeneId>> erdos_renyi(const SynthConfig& cfg, Rng& rng) {
    std::vector<std::pair<GeneId, GeneId>> edges;
    for (std::size_t i = 0; i < cfg.n; ++i)
        for (std::size_t j = i + 1; j < cfg.n; ++j)
            if (uniform_unit(rng) < cfg.edge_prob) edges.emplace_back(i, j);
    return edges;
}

}  // namespace detail

inline SynthBenchmark generate_benchmark(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, "synth-graph"));
    auto raw = cfg.model == EdgeModel::PreferentialAttachment ? detail::preferential_attachment(cfg, rng)
                                                              : detail::erdos_renyi(cfg, rng);
    if (raw.empty()) throw Error("synth: generated graph has no edges");
    for (auto& [a, b] : raw) {
        a += cfg.gene_id_offset;
        b += cfg.gene_id_offset;
    }

    SynthBenchmark out;
    out.graph = InteractomeGraph::from_edges(raw);
    LccResult lcc = largest_connected_component(out.graph);
    if (lcc.graph.size() * 10 < cfg.n * 9)
        throw Error("synth: largest component has " + std::to_string(lcc.graph.size()) + " of " +
                    std::to_string(cfg.n) + " nodes (< 90%); raise the edge density");
    const InteractomeGraph& g = lcc.graph;
    if (cfg.genes_max > g.size()) throw Error("synth: more module genes requested than component nodes");

    // anchors
    std::vector<NodeIndex> anchors(g.size());
    std::iota(anchors.begin(), anchors.end(), NodeIndex{0});
    if (cfg.anchors == AnchorRule::LowDegree) {
        auto deg = node_degrees(g);
        std::vector<std::size_t> sorted = deg;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
        const std::size_t median = sorted[sorted.size() / 2];
        std::erase_if(anchors, [&](NodeIndex v) { return deg[v] > median; });
    }
    if (anchors.size() < cfg.n_diseases)
        throw Error("synth: only " + std::to_string(anchors.size()) + " eligible anchors for " +
                    std::to_string(cfg.n_diseases) + " diseases");
    Rng module_rng(derive_seed(cfg.seed, "synth-modules"));
    shuffle(anchors, module_rng);
    anchors.resize(cfg.n_diseases);

    // modules: breadth-first neighborhoods with shuffled neighbor order
    std::vector<std::vector<NodeIndex>> modules;
    const std::size_t width = std::to_string(cfg.n_diseases - 1).size();
    for (std::size_t d = 0; d < cfg.n_diseases; ++d) {
        const std::size_t size = cfg.genes_min + uniform_index(module_rng, cfg.genes_max - cfg.genes_min + 1);
        std::vector<NodeIndex> order{anchors[d]};
        std::vector<char> seen(g.size(), 0);
        seen[anchors[d]] = 1;
        for (std::size_t h = 0; h < order.size() && order.size() < size; ++h) {
            std::vector<NodeIndex> nbrs = g.adjacency[order[h]];
            shuffle(nbrs, module_rng);
            for (NodeIndex v : nbrs)
                if (!seen[v] && order.size() < size) {
                    seen[v] = 1;
                    order.push_back(v);
                }
        }
        std::string name = std::to_string(d);
        name = "D" + std::string(width - name.size(), '0') + name;
        for (NodeIndex v : order) out.diseases.add(name, g.node_ids[v]);
        std::sort(order.begin(), order.end());
        modules.push_back(std::move(order));
    }

    // mean cross-module distances
    const DistanceMatrix dist = all_pairs_shortest_paths(g);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < cfg.n_diseases; ++a)
        for (std::size_t b = a + 1; b < cfg.n_diseases; ++b) {
            double s = 0.0;
            for (NodeIndex u : modules[a])
                for (NodeIndex v : modules[b]) s += dist(u, v);
            out.mean_distance.push_back(s / static_cast<double>(modules[a].size() * modules[b].size()));
            pairs.emplace_back(a, b);
        }
    std::vector<double> sorted = out.mean_distance;
    std::sort(sorted.begin(), sorted.end());
    out.tau = cfg.tau > 0 ? cfg.tau : sorted[sorted.size() / 2];
    out.tau_zero = cfg.tau_zero > 0 ? cfg.tau_zero : sorted[sorted.size() * 3 / 4];
    if (out.tau_zero < out.tau) out.tau_zero = out.tau;

    Rng flip_rng(derive_seed(cfg.seed, "synth-flips"));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double m = out.mean_distance[p];
        double rr = m < out.tau ? 2.0 : (m < out.tau_zero ? 0.5 : 0.0);
        // one draw per pair regardless of epsilon, so flipped sets are nested in epsilon
        if (uniform_unit(flip_rng) < cfg.epsilon) rr = rr > 1.0 ? 0.5 : 2.0;
        out.rr.rows.push_back({out.diseases.diseases[pairs[p].first], out.diseases.diseases[pairs[p].second], rr});
    }
    return out;
}

struct BenchmarkPaths {
    std::string interactome;
    std::string disease_genes;
    std::string rr;
};

inline BenchmarkPaths write_benchmark(const SynthBenchmark& b, const std::string& dir) {
    std::filesystem::create_directories(dir);
    BenchmarkPaths p{dir + "/interactome.tsv", dir + "/disease_genes.tsv", dir + "/rr.tsv"};
    write_edge_list(b.graph, p.interactome);
    write_disease_genes(b.diseases, p.disease_genes);
    write_rr_table(b.rr, p.rr);
    return p;
}

}  // namespace bse
