#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "bse/pipeline.hpp"
#include "bse/synthgen.hpp"

using namespace bse;

namespace {

// keys that may also be given as --<key>
const std::vector<std::string> kFlagKeys = {"interactome", "disease_genes", "rr", "work_dir", "out_dir", "variants",
                                            "thresholds", "d", "k", "inner_folds", "outer_folds", "C", "gamma",
                                            "mode", "exponent", "seed", "workers", "top_n", "first_m", "ranking",
                                            "prefix_curve"};

struct ConfigFlags {
    std::string file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
};

void add_config_flags(CLI::App* app, ConfigFlags& cf) {
    app->add_option("-c,--config", cf.file, "key = value config file");
    app->add_option("--set", cf.sets, "override: key=value (repeatable)");
    for (const auto& k : kFlagKeys) app->add_option("--" + k, cf.flags[k], "config key " + k);
}

RunConfig resolve(const ConfigFlags& cf) {
    RunConfig cfg;
    if (!cf.file.empty()) load_config_file(cfg, cf.file);
    for (const auto& k : kFlagKeys)
        if (auto it = cf.flags.find(k); it != cf.flags.end() && !it->second.empty()) set_config_value(cfg, k, it->second);
    for (const auto& s : cf.sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        set_config_value(cfg, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supervised selection of graph-embedding dimensions for disease comorbidity prediction"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");
    app.add_flag("-q,--quiet", quiet, "warnings only");

    ConfigFlags prep_cf, run_cf, sel_cf, eval_cf, an_cf;
    auto* prep = app.add_subcommand("prepare", "component, distance cache and node map");
    add_config_flags(prep, prep_cf);
    auto* run = app.add_subcommand("run", "full variant x threshold grid with every report");
    add_config_flags(run, run_cf);
    auto* sel = app.add_subcommand("select", "one greedy selection on the whole dataset");
    add_config_flags(sel, sel_cf);
    std::string sel_variant = "E1";
    double sel_threshold = 1.0;
    sel->add_option("--variant", sel_variant, "E1, E3 or E5");
    sel->add_option("--threshold", sel_threshold, "relative-risk threshold");
    auto* eval = app.add_subcommand("evaluate", "outer cross-validation per variant, no analyses");
    add_config_flags(eval, eval_cf);
    auto* an = app.add_subcommand("analyze", "top genes and R for a selection record file");
    add_config_flags(an, an_cf);
    std::string an_file;
    an->add_option("selections", an_file, "selection records")->required();

    auto* syn = app.add_subcommand("synth", "write a synthetic benchmark");
    SynthConfig sc;
    std::string syn_dir = "synth", syn_model = "pa", syn_anchor = "any";
    syn->add_option("--out", syn_dir, "output directory");
    syn->add_option("--n", sc.n, "nodes");
    syn->add_option("--model", syn_model, "pa or er")->check(CLI::IsMember({"pa", "er"}));
    syn->add_option("--attach", sc.attach, "edges per new node (pa)");
    syn->add_option("--edge-prob", sc.edge_prob, "edge probability (er)");
    syn->add_option("--diseases", sc.n_diseases, "number of diseases");
    syn->add_option("--genes-min", sc.genes_min);
    syn->add_option("--genes-max", sc.genes_max);
    syn->add_option("--epsilon", sc.epsilon, "label flip probability");
    syn->add_option("--anchors", syn_anchor, "any or low-degree")->check(CLI::IsMember({"any", "low-degree"}));
    syn->add_option("--seed", sc.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;  // usage errors count as config errors
    }
    set_log_level(verbose ? LogLevel::Debug : quiet ? LogLevel::Warn : LogLevel::Info);

    try {
        if (*prep) {
            RunConfig cfg = resolve(prep_cf);
            validate(cfg);
            auto r = cmd_prepare(cfg, load_inputs(cfg));
            std::cout << "component nodes: " << r.lcc_size << (r.computed ? " (distances computed)" : " (cache reused)")
                      << '\n';
        } else if (*run || *eval) {
            RunConfig cfg = resolve(*run ? run_cf : eval_cf);
            RunOptions opt;
            opt.analyses = static_cast<bool>(*run);
            auto r = cmd_run(cfg, opt);
            std::size_t failed = 0;
            for (const auto& c : r.cells) failed += !c.ok;
            std::cout << r.cells.size() - failed << " of " << r.cells.size() << " cells completed\n";
            return r.exit_code();
        } else if (*sel) {
            RunConfig cfg = resolve(sel_cf);
            std::cout << format_selection(cmd_select(cfg, parse_variant(sel_variant), sel_threshold), 0);
        } else if (*an) {
            RunConfig cfg = resolve(an_cf);
            std::cout << "R = " << cmd_analyze(cfg, an_file) << '\n';
        } else if (*syn) {
            sc.model = syn_model == "er" ? EdgeModel::ErdosRenyi : EdgeModel::PreferentialAttachment;
            sc.anchors = syn_anchor == "low-degree" ? AnchorRule::LowDegree : AnchorRule::Any;
            try {
                sc.validate();
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
            auto b = generate_benchmark(sc);
            auto p = write_benchmark(b, syn_dir);
            std::cout << p.interactome << '\n' << p.disease_genes << '\n' << p.rr << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
