#pragma once

// Greedy supervised selection of embedding columns.
//
// Starting from an empty set, every round scores each remaining column c by the
// mean cross-validated AUC of the classifier trained on the pair features of
// (selected + c), appends the best column, and repeats until d columns are chosen.
// Exact ties are broken uniformly at random from the seeded generator. The same
// inner fold plan is used for every candidate of a run, so scores are comparable.
//
// evaluate_variant wraps selection (or the rank baseline) in an outer stratified
// k-fold loop and reports the five metrics per fold.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "pairfeat.hpp"
#include "spectral.hpp"
#include "svm.hpp"

namespace bse {

/// Where the inner selection CV draws its folds from.
///   PaperFaithful: the whole dataset (selection sees outer test rows).
///   Nested: the outer training fold only.
enum class SelectionMode { PaperFaithful, Nested };

inline std::string to_string(SelectionMode m) { return m == SelectionMode::Nested ? "nested" : "paper-faithful"; }

inline SelectionMode parse_selection_mode(const std::string& s) {
    if (s == "paper-faithful" || s == "paper") return SelectionMode::PaperFaithful;
    if (s == "nested") return SelectionMode::Nested;
    throw Error("unknown selection mode '" + s + "' (expected paper-faithful or nested)");
}

struct VariantConfig {
    Variant variant = Variant::E1;
    std::size_t d = 20;
    std::size_t k = 100;
    std::size_t inner_folds = 5;
    std::size_t outer_folds = 10;
    SvmParams svm{};
    SelectionMode mode = SelectionMode::PaperFaithful;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    bool record_candidates = false;

    void validate() const {
        if (d > k) throw Error("variant config: d=" + std::to_string(d) + " exceeds k=" + std::to_string(k));
        if (inner_folds < 2 || outer_folds < 2) throw Error("variant config: fold counts must be at least 2");
    }
};

struct CandidateScore {
    std::size_t column = 0;
    double mean_auc = 0.0;
};

struct SelectionResult {
    std::vector<std::size_t> selected;  // source columns, in selection order
    std::vector<double> trace;          // winning mean AUC per round
    std::uint64_t seed = 0;        // tie-break stream
    std::uint64_t inner_seed = 0;  // inner fold plan
    Variant variant = Variant::E1;
    std::size_t inner_folds = 0;
    SelectionMode mode = SelectionMode::PaperFaithful;
    std::vector<std::vector<CandidateScore>> candidates;  // per round, when recorded
};

namespace detail {
inline PairDataset take_samples(const PairDataset& ds, std::span<const std::size_t> rows) {
    PairDataset out;
    out.column_origin = ds.column_origin;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = ds.features.row(static_cast<Eigen::Index>(rows[r]));
        out.labels.push_back(ds.labels[rows[r]]);
        out.pairs.push_back(ds.pairs[rows[r]]);
    }
    return out;
}
}  // namespace detail

/// Mean inner-CV AUC per column set (sorted), valid for one dataset, inner plan and SVM setting.
struct ScoreCache {
    std::map<std::vector<std::size_t>, double> scores;
    std::mutex mutex;
};

/// Greedy selection of cfg.d columns from the dataset's source columns. When
/// `rows` is non-empty only those samples are visible to the inner CV.
/// `inner_plan` replaces the plan derived from cfg.seed (indices into the visible rows).
inline SelectionResult bse_select(const PairDataset& full, const VariantConfig& cfg,
                                  std::span<const std::size_t> rows = {}, const FoldPlan* inner_plan = nullptr,
                                  ScoreCache* cache = nullptr) {
    const std::vector<std::size_t> pool = full.source_columns();
    if (cfg.d > pool.size())
        throw Error("bse_select: d=" + std::to_string(cfg.d) + " exceeds the " + std::to_string(pool.size()) +
                    " available columns");
    SelectionResult result;
    result.seed = cfg.seed;
    result.variant = cfg.variant;
    result.inner_folds = cfg.inner_folds;
    result.mode = cfg.mode;
    if (cfg.d == 0) return result;

    const PairDataset visible = rows.empty() ? full : detail::take_samples(full, rows);
    const FoldPlan plan =
        inner_plan ? *inner_plan : stratified_kfold(visible.labels, cfg.inner_folds, derive_seed(cfg.seed, "inner-cv"));
    if (plan.k() != cfg.inner_folds) throw Error("bse_select: inner plan fold count does not match the config");
    result.inner_seed = plan.seed;
    Rng tie_rng(derive_seed(cfg.seed, "tie-break"));

    std::vector<char> taken(pool.size(), 0);
    for (std::size_t round = 0; round < cfg.d; ++round) {
        std::vector<std::size_t> candidates;
        for (std::size_t p = 0; p < pool.size(); ++p)
            if (!taken[p]) candidates.push_back(p);

        std::vector<double> scores(candidates.size());
        parallel_for(candidates.size(), cfg.workers, [&](std::size_t c) {
            std::vector<std::size_t> cols = result.selected;
            cols.push_back(pool[candidates[c]]);
            std::sort(cols.begin(), cols.end());
            if (cache) {
                std::lock_guard lock(cache->mutex);
                if (auto it = cache->scores.find(cols); it != cache->scores.end()) {
                    scores[c] = it->second;
                    return;
                }
            }
            try {
                PairDataset sub = select_coordinates(visible, cols);
                scores[c] = cv_mean_auc(sub.features, sub.labels, plan, cfg.svm);
                if (cache) {
                    std::lock_guard lock(cache->mutex);
                    cache->scores.emplace(std::move(cols), scores[c]);
                }
            } catch (const Error& e) {
                throw Error("bse_select: candidate column " + std::to_string(pool[candidates[c]]) + ": " + e.what());
            }
        });

        // collect, then reduce: max score, uniform choice among exact ties
        double best = -std::numeric_limits<double>::infinity();
        for (double s : scores)
            if (s > best) best = s;
        std::vector<std::size_t> ties;
        for (std::size_t c = 0; c < scores.size(); ++c)
            if (scores[c] == best) ties.push_back(c);
        if (ties.empty()) throw Error("bse_select: no finite candidate score in round " + std::to_string(round));
        const std::size_t winner = ties.size() == 1 ? ties[0] : ties[uniform_index(tie_rng, ties.size())];

        if (cfg.record_candidates) {
            std::vector<CandidateScore> rec;
            for (std::size_t c = 0; c < candidates.size(); ++c) rec.push_back({pool[candidates[c]], scores[c]});
            result.candidates.push_back(std::move(rec));
        }
        taken[candidates[winner]] = 1;
        result.selected.push_back(pool[candidates[winner]]);
        result.trace.push_back(best);
    }
    return result;
}

/// Indices of the d largest values, descending; equal values keep the lower index first.
inline std::vector<std::size_t> rank_select(std::span<const double> values, std::size_t d) {
    if (d > values.size()) throw Error("rank_select: d exceeds the number of values");
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    idx.resize(d);
    return idx;
}

/// Union of the first m selections of every result, ascending.
inline std::vector<std::size_t> union_first_m(const std::vector<SelectionResult>& results, std::size_t m) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < results.size(); ++r) {
        if (results[r].selected.size() < m)
            throw Error("union_first_m: result " + std::to_string(r) + " has only " +
                        std::to_string(results[r].selected.size()) + " selections");
        out.insert(out.end(), results[r].selected.begin(), results[r].selected.begin() + static_cast<std::ptrdiff_t>(m));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// outer evaluation

struct MetricSummary {
    MetricSet mean;
    MetricSet std;  // sample standard deviation across folds
};

inline MetricSummary summarize(const std::vector<MetricSet>& folds) {
    MetricSummary s;
    const double n = static_cast<double>(folds.size());
    double* mean_fields[] = {&s.mean.precision, &s.mean.recall, &s.mean.f1, &s.mean.accuracy, &s.mean.roc_auc};
    double* std_fields[] = {&s.std.precision, &s.std.recall, &s.std.f1, &s.std.accuracy, &s.std.roc_auc};
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        double sum = 0;
        for (const auto& f : folds) sum += metric_value(f, m);
        const double mean = n > 0 ? sum / n : 0.0;
        double ss = 0;
        for (const auto& f : folds) ss += (metric_value(f, m) - mean) * (metric_value(f, m) - mean);
        *mean_fields[m] = mean;
        *std_fields[m] = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    }
    return s;
}

struct VariantEvaluation {
    Variant variant = Variant::E1;
    std::vector<MetricSet> folds;
    MetricSummary summary;
    std::vector<std::vector<std::size_t>> columns;  // columns used in each outer fold
    std::vector<SelectionResult> selections;        // select variants only
    FoldPlan outer_plan;
};

/// Outer fold plan shared by every variant of one dataset, so select and rank
/// results are paired fold by fold.
inline FoldPlan outer_fold_plan(const PairDataset& ds, std::size_t folds, std::uint64_t seed) {
    return stratified_kfold(ds.labels, folds, derive_seed(seed, "outer-cv"));
}

/// Trains on each outer training fold with fixed columns and scores the test fold.
inline std::vector<MetricSet> evaluate_fixed_columns(const PairDataset& ds, std::span<const std::size_t> columns,
                                                     const FoldPlan& plan, const SvmParams& svm) {
    PairDataset sub = select_coordinates(ds, columns);
    std::vector<MetricSet> out;
    for (std::size_t f = 0; f < plan.k(); ++f) {
        auto train = plan.training(f);
        out.push_back(train_and_score(sub.features, sub.labels, train, plan.folds[f], svm).metrics);
    }
    return out;
}

/// Outer k-fold evaluation of one variant. `ds` is built from the variant's raw
/// k-column embedding and `values` are that embedding's eigen/singular values.
inline VariantEvaluation evaluate_variant(const VariantConfig& cfg, const PairDataset& ds,
                                          std::span<const double> values) {
    cfg.validate();
    VariantEvaluation ev;
    ev.variant = cfg.variant;
    ev.outer_plan = outer_fold_plan(ds, cfg.outer_folds, cfg.seed);
    const auto pool = ds.source_columns();
    if (values.size() != pool.size()) throw Error("evaluate_variant: value count does not match dataset columns");
    if (cfg.d > pool.size())
        throw Error("evaluate_variant: d=" + std::to_string(cfg.d) + " exceeds the " + std::to_string(pool.size()) +
                    " available columns");

    std::vector<std::size_t> rank_cols;
    if (!is_select_variant(cfg.variant))
        for (auto p : rank_select(values, cfg.d)) rank_cols.push_back(pool[p]);

    // paper-faithful folds all select over the full dataset with one inner plan;
    // they differ only in tie-break seeds, so candidate scores are shared
    const bool faithful = cfg.mode == SelectionMode::PaperFaithful;
    std::optional<FoldPlan> shared_plan;
    ScoreCache cache;
    if (is_select_variant(cfg.variant) && faithful && cfg.d > 0)
        shared_plan = stratified_kfold(ds.labels, cfg.inner_folds, derive_seed(cfg.seed, "inner-cv"));

    for (std::size_t f = 0; f < ev.outer_plan.k(); ++f) {
        const auto train = ev.outer_plan.training(f);
        std::vector<std::size_t> cols = rank_cols;
        if (is_select_variant(cfg.variant)) {
            VariantConfig inner = cfg;
            inner.seed = derive_seed(cfg.seed, "select", {f});
            SelectionResult sel = faithful ? bse_select(ds, inner, {}, shared_plan ? &*shared_plan : nullptr, &cache)
                                           : bse_select(ds, inner, train);
            cols = sel.selected;
            ev.selections.push_back(std::move(sel));
        }
        PairDataset sub = select_coordinates(ds, cols);
        ev.folds.push_back(train_and_score(sub.features, sub.labels, train, ev.outer_plan.folds[f], cfg.svm).metrics);
        ev.columns.push_back(std::move(cols));
    }
    ev.summary = summarize(ev.folds);
    return ev;
}

/// Mean outer-fold metrics when only the first p columns of each fold's list are used, p = 1..d.
inline std::vector<MetricSet> prefix_curve(const VariantEvaluation& ev, const PairDataset& ds, const SvmParams& svm) {
    std::size_t d = ev.columns.empty() ? 0 : ev.columns.front().size();
    std::vector<MetricSet> curve;
    for (std::size_t p = 1; p <= d; ++p) {
        std::vector<MetricSet> folds;
        for (std::size_t f = 0; f < ev.outer_plan.k(); ++f) {
            std::vector<std::size_t> cols(ev.columns[f].begin(), ev.columns[f].begin() + static_cast<std::ptrdiff_t>(p));
            PairDataset sub = select_coordinates(ds, cols);
            auto train = ev.outer_plan.training(f);
            folds.push_back(train_and_score(sub.features, sub.labels, train, ev.outer_plan.folds[f], svm).metrics);
        }
        curve.push_back(summarize(folds).mean);
    }
    return curve;
}

// ---------------------------------------------------------------------------
// selection records: one "key: value" line per field, blank line between records

inline std::string format_selection(const SelectionResult& r, std::size_t fold) {
    std::ostringstream out;
    out.precision(17);
    out << "variant: " << to_string(r.variant) << '\n';
    out << "fold: " << fold << '\n';
    out << "seed: " << r.seed << '\n';
    out << "inner_seed: " << r.inner_seed << '\n';
    out << "mode: " << to_string(r.mode) << '\n';
    out << "inner_folds: " << r.inner_folds << '\n';
    out << "selected:";
    for (auto c : r.selected) out << ' ' << c;
    out << "\ntrace:";
    for (double t : r.trace) out << ' ' << t;
    out << "\n\n";
    return out.str();
}

inline std::vector<SelectionResult> parse_selections(std::istream& in) {
    std::vector<SelectionResult> out;
    SelectionResult cur;
    bool open = false;
    std::string line;
    auto flush = [&] {
        if (open) out.push_back(cur);
        cur = {};
        open = false;
    };
    while (std::getline(in, line)) {
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw Error("selection record: malformed line '" + line + "'");
        std::string key = line.substr(0, colon);
        std::istringstream val(line.substr(colon + 1));
        open = true;
        if (key == "variant") {
            std::string v;
            val >> v;
            cur.variant = parse_variant(v);
        } else if (key == "seed") {
            val >> cur.seed;
        } else if (key == "inner_seed") {
            val >> cur.inner_seed;
        } else if (key == "mode") {
            std::string v;
            val >> v;
            cur.mode = parse_selection_mode(v);
        } else if (key == "inner_folds") {
            val >> cur.inner_folds;
        } else if (key == "selected") {
            std::size_t c;
            while (val >> c) cur.selected.push_back(c);
        } else if (key == "trace") {
            double t;
            while (val >> t) cur.trace.push_back(t);
        }
    }
    flush();
    return out;
}

}  // namespace bse
