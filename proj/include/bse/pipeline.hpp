#pragma once

// End-to-end stages behind the command-line tool: prepare (LCC + distance cache),
// run (the variant x threshold grid and every report), and smaller entry points.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bioanalysis.hpp"
#include "bse.hpp"
#include "common.hpp"
#include "config.hpp"
#include "graphdist.hpp"
#include "netio.hpp"
#include "pairfeat.hpp"
#include "spectral.hpp"
#include "svm.hpp"

namespace bse {

namespace fs = std::filesystem;

struct InputData {
    InteractomeGraph lcc;
    DegreeVector degrees;
    DiseaseGeneMap diseases;
    RRTable rr;
    LccDiseaseSets sets;
};

inline InputData load_inputs(const RunConfig& cfg) {
    InputData in;
    InteractomeGraph g = load_edge_list(cfg.interactome);
    in.lcc = largest_connected_component(g).graph;
    in.degrees = node_degrees(in.lcc);
    in.diseases = load_disease_genes(cfg.disease_genes);
    in.rr = load_rr_table(cfg.rr, &in.diseases);
    in.sets = restrict_to_lcc(in.diseases, in.lcc);
    info("component: " + std::to_string(in.lcc.size()) + " of " + std::to_string(g.size()) + " nodes");
    return in;
}

inline std::string cache_path(const RunConfig& cfg) { return cfg.work_dir + "/distances.bsed"; }
inline std::string node_map_path(const RunConfig& cfg) { return cfg.work_dir + "/nodes.tsv"; }

inline std::string node_map_text(const InteractomeGraph& lcc, const DegreeVector& degrees) {
    std::ostringstream s;
    s << "index\tgene_id\tdegree\n";
    for (std::size_t i = 0; i < lcc.size(); ++i) s << i << '\t' << lcc.node_ids[i] << '\t' << degrees[i] << '\n';
    return s.str();
}

struct PrepareResult {
    bool computed = false;     // APSP ran
    bool regenerated = false;  // an existing cache was rejected
    std::size_t lcc_size = 0;
    DistanceMatrix distances;
};

/// Writes the distance cache and node map unless a valid cache for the same
/// component already exists.
inline PrepareResult cmd_prepare(const RunConfig& cfg, const InputData& in) {
    fs::create_directories(cfg.work_dir);
    PrepareResult r;
    r.lcc_size = in.lcc.size();
    const std::string nodes = node_map_text(in.lcc, in.degrees);

    CacheRead cached = read_distance_cache(cache_path(cfg));
    std::string reason = cached.reason;
    if (cached.status == CacheStatus::Ok) {
        std::ifstream nm(node_map_path(cfg));
        std::stringstream existing;
        existing << nm.rdbuf();
        if (cached.matrix.size() != in.lcc.size()) reason = "node count differs from the component";
        else if (existing.str() != nodes) reason = "node map differs from the component";
        else {
            r.distances = std::move(cached.matrix);
            info("distance cache is valid; skipping shortest paths");
            return r;
        }
    }
    if (cached.status != CacheStatus::Missing) {
        warn("distance cache rejected (" + reason + "); regenerating");
        r.regenerated = true;
    }
    r.distances = all_pairs_shortest_paths(in.lcc, cfg.workers);
    r.computed = true;
    write_distance_cache(r.distances, cache_path(cfg));
    std::ofstream nm(node_map_path(cfg));
    if (!nm) throw Error("cannot write " + node_map_path(cfg));
    nm << nodes;
    return r;
}

inline std::string threshold_label(double t) { return "rr" + detail::format_real(t); }

struct CellStatus {
    Variant variant = Variant::E1;
    double threshold = 0.0;
    bool ok = false;
    std::string message;
};

struct RunResult {
    std::vector<CellStatus> cells;
    std::size_t failed_reports = 0;

    int exit_code() const {
        for (const auto& c : cells)
            if (!c.ok) return 1;
        return failed_reports ? 1 : 0;
    }
};

struct RunOptions {
    bool analyses = true;  // comparison, union, top-gene and ratio reports
};

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

struct FamilyOutcome {
    std::optional<VariantEvaluation> select, rank;
    std::vector<MetricSet> curve_select, curve_rank;
    const Embedding* z = nullptr;
    const PairDataset* ds = nullptr;
};

}  // namespace detail

/// Runs every (variant, threshold) cell, then the per-family analyses. A failed
/// cell is recorded and the rest continue.
inline RunResult cmd_run(const RunConfig& cfg, RunOptions opt = {}) {
    validate(cfg);
    const std::string preamble = serialize(cfg);
    InputData in = load_inputs(cfg);
    PrepareResult prep = cmd_prepare(cfg, in);
    fs::create_directories(cfg.out_dir);
    detail::write_text(cfg.out_dir + "/run_config.txt", preamble);

    RunResult result;
    const Ranking ranking = parse_ranking(cfg.ranking);
    RawEmbeddingOptions ro;
    ro.k = cfg.k;
    ro.exponent = cfg.exponent;
    ro.eigen.seed = derive_seed(cfg.seed, "eigen");

    // raw embeddings are shared by the select/rank pair of each family
    std::map<Variant, Embedding> raw;
    std::map<Variant, std::string> raw_error;
    auto raw_of = [&](Variant v) -> const Embedding& {
        const Variant rv = raw_variant(v);
        if (auto e = raw_error.find(rv); e != raw_error.end()) throw Error(e->second);
        if (auto it = raw.find(rv); it != raw.end()) return it->second;
        try {
            return raw.emplace(rv, build_raw_embedding(rv, prep.distances, ro)).first->second;
        } catch (const Error& e) {
            raw_error.emplace(rv, e.what());
            throw;
        }
    };

    std::vector<RatioRow> ratios;
    for (double t : cfg.thresholds) {
        const std::string tl = threshold_label(t);
        const std::string dir = cfg.out_dir + "/" + tl;
        fs::create_directories(dir);
        LabeledPairs labels = label_pairs(in.rr, t);
        if (std::size_t dropped = drop_empty_pairs(labels, in.sets))
            info(tl + ": dropped " + std::to_string(dropped) + " pairs with no component genes");
        const std::string cell_preamble = preamble + "# threshold = " + detail::format_real(t) + "\n# samples = " +
                                          std::to_string(labels.pairs.size()) + "\n# positive_fraction = " +
                                          detail::format_real(labels.positive_fraction) + '\n';

        std::map<Variant, PairDataset> datasets;
        std::map<std::string, detail::FamilyOutcome> families;
        for (Variant v : cfg.variants) {
            CellStatus st{v, t, false, {}};
            try {
                const Embedding& z = raw_of(v);
                const Variant rv = raw_variant(v);
                auto it = datasets.find(rv);
                if (it == datasets.end()) it = datasets.emplace(rv, assemble_dataset(z, in.sets, labels)).first;
                const PairDataset& ds = it->second;
                VariantConfig vc = cfg.variant_config(v);
                vc.d = std::min(vc.d, z.dims());
                VariantEvaluation ev = evaluate_variant(vc, ds, z.values_used);

                const std::string stem = dir + "/" + to_string(v);
                const std::string vp = cell_preamble + "# variant = " + to_string(v) + " (" + method_label(v) + ")\n";
                write_fold_metrics_csv(ev.folds, stem + "_folds.csv", vp);
                write_summary_csv(ev.summary, method_label(v), stem + "_summary.csv", vp);
                if (!ev.selections.empty()) {
                    std::ostringstream recs;
                    recs << vp;
                    for (std::size_t f = 0; f < ev.selections.size(); ++f) recs << format_selection(ev.selections[f], f);
                    detail::write_text(stem + "_selections.txt", recs.str());
                }
                auto& fam = families[method_family(v)];
                if (cfg.prefix_curve) {
                    auto curve = prefix_curve(ev, ds, vc.svm);
                    write_prefix_curve_csv(curve, stem + "_prefix_curve.csv", vp);
                    (is_select_variant(v) ? fam.curve_select : fam.curve_rank) = std::move(curve);
                }
                fam.z = &z;
                fam.ds = &ds;
                (is_select_variant(v) ? fam.select : fam.rank) = std::move(ev);
                st.ok = true;
            } catch (const std::exception& e) {
                st.message = e.what();
                warn(tl + " " + to_string(v) + ": " + st.message);
            }
            result.cells.push_back(st);
        }

        if (!opt.analyses) continue;
        for (auto& [family, fam] : families) {
            if (!fam.select || !fam.rank) continue;
            try {
                const std::string stem = dir + "/" + family;
                const std::string fp = cell_preamble + "# method = " + family + '\n';
                ComparisonStats cmp = compare_methods(fam.select->folds, fam.rank->folds);
                write_comparison_csv(cmp, family + "_r", family + "_s", stem + "_comparison.csv", fp);

                const std::size_t m = std::min(cfg.first_m, fam.select->columns.front().size());
                auto uni = union_first_m(fam.select->selections, m);
                MetricSummary us = union_dim_scores(*fam.ds, uni, fam.select->outer_plan, cfg.svm());
                std::string ul = "# union_columns =";
                for (auto c : uni) ul += " " + std::to_string(c);
                write_summary_csv(us, family + "_u", stem + "_union.csv", fp + ul + '\n');

                auto sel_dims = first_m_by_frequency(fam.select->selections, m);
                std::vector<std::size_t> rank_dims(fam.rank->columns.front().begin(),
                                                   fam.rank->columns.front().begin() + static_cast<std::ptrdiff_t>(m));
                TopGeneTable ts = top_genes(*fam.z, in.lcc.node_ids, sel_dims, std::min(cfg.top_n, fam.z->rows()), ranking);
                TopGeneTable tr = top_genes(*fam.z, in.lcc.node_ids, rank_dims, std::min(cfg.top_n, fam.z->rows()), ranking);
                annotate(ts, in.diseases, in.lcc, in.degrees);
                annotate(tr, in.diseases, in.lcc, in.degrees);
                write_top_genes_csv(ts, stem + "_top_genes_select.csv", fp);
                write_top_genes_csv(tr, stem + "_top_genes_rank.csv", fp);
                write_dimension_totals_csv(dimension_totals(ts), stem + "_dim_totals_select.csv", fp);
                write_dimension_totals_csv(dimension_totals(tr), stem + "_dim_totals_rank.csv", fp);
                write_top_genes_svg(ts, stem + "_top_genes_select.svg", family + "_s " + tl);
                write_top_genes_svg(tr, stem + "_top_genes_rank.svg", family + "_r " + tl);
                ratios.push_back({family, tl, ratio_R(ts), ratio_R(tr)});

                if (cfg.prefix_curve)
                    write_prefix_curve_svg({{family + "_s", fam.curve_select}, {family + "_r", fam.curve_rank}},
                                           stem + "_prefix_curve.svg");
            } catch (const std::exception& e) {
                ++result.failed_reports;
                warn(tl + " " + family + " analyses: " + e.what());
            }
        }
    }
    if (opt.analyses && !ratios.empty())
        write_ratio_csv(ratios, cfg.out_dir + "/ratio.csv", preamble);

    std::ostringstream cells;
    cells << preamble << "threshold,variant,status,message\n";
    for (const auto& c : result.cells)
        cells << detail::format_real(c.threshold) << ',' << to_string(c.variant) << ',' << (c.ok ? "ok" : "failed") << ",\""
              << c.message << "\"\n";
    detail::write_text(cfg.out_dir + "/cells.csv", cells.str());
    return result;
}

/// One greedy selection on the whole labelled dataset for one variant and threshold.
inline SelectionResult cmd_select(const RunConfig& cfg, Variant v, double threshold) {
    validate(cfg);
    if (!is_select_variant(v)) throw ConfigError("select: " + to_string(v) + " is a rank variant");
    InputData in = load_inputs(cfg);
    PrepareResult prep = cmd_prepare(cfg, in);
    RawEmbeddingOptions ro;
    ro.k = cfg.k;
    ro.exponent = cfg.exponent;
    ro.eigen.seed = derive_seed(cfg.seed, "eigen");
    Embedding z = build_raw_embedding(v, prep.distances, ro);
    LabeledPairs labels = label_pairs(in.rr, threshold);
    drop_empty_pairs(labels, in.sets);
    PairDataset ds = assemble_dataset(z, in.sets, labels);
    VariantConfig vc = cfg.variant_config(v);
    vc.d = std::min(vc.d, z.dims());
    SelectionResult r = bse_select(ds, vc);
    fs::create_directories(cfg.out_dir);
    detail::write_text(cfg.out_dir + "/select_" + to_string(v) + "_" + threshold_label(threshold) + ".txt",
                       serialize(cfg) + format_selection(r, 0));
    return r;
}

/// Top genes and R for a recorded selection file against the raw embedding of its variant.
inline double cmd_analyze(const RunConfig& cfg, const std::string& selections_path) {
    validate(cfg);
    std::ifstream sf(selections_path);
    if (!sf) throw Error("cannot open " + selections_path);
    auto sels = parse_selections(sf);
    if (sels.empty()) throw Error(selections_path + ": no selection records");
    InputData in = load_inputs(cfg);
    PrepareResult prep = cmd_prepare(cfg, in);
    RawEmbeddingOptions ro;
    ro.k = cfg.k;
    ro.exponent = cfg.exponent;
    ro.eigen.seed = derive_seed(cfg.seed, "eigen");
    Embedding z = build_raw_embedding(raw_variant(sels.front().variant), prep.distances, ro);
    const std::size_t m = std::min(cfg.first_m, sels.front().selected.size());
    TopGeneTable t = top_genes(z, in.lcc.node_ids, first_m_by_frequency(sels, m), std::min(cfg.top_n, z.rows()),
                               parse_ranking(cfg.ranking));
    annotate(t, in.diseases, in.lcc, in.degrees);
    fs::create_directories(cfg.out_dir);
    const std::string stem = cfg.out_dir + "/analyze_" + to_string(sels.front().variant);
    std::ostringstream pre;
    pre << serialize(cfg) << "# selections = " << selections_path << "\n# R = " << detail::format_real(ratio_R(t)) << '\n';
    write_top_genes_csv(t, stem + "_top_genes.csv", pre.str());
    write_top_genes_svg(t, stem + "_top_genes.svg", method_label(sels.front().variant));
    return ratio_R(t);
}

}  // namespace bse
