#pragma once

// Run configuration: a flat "key = value" file, '#' comments. Command-line flags
// override file keys. The resolved config is stamped into every output.

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bse.hpp"
#include "common.hpp"
#include "spectral.hpp"

namespace bse {

/// Bad or inconsistent configuration (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string interactome;
    std::string disease_genes;
    std::string rr;
    std::string work_dir = "bse_work";  // distance cache and node map
    std::string out_dir = "bse_out";
    std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()};
    std::vector<double> thresholds{0.0, 1.0};
    std::size_t d = 20;
    std::size_t k = 100;
    std::size_t inner_folds = 5;
    std::size_t outer_folds = 10;
    double C = 3.5;
    double gamma = 0.0;  // <= 0: scale rule
    SelectionMode mode = SelectionMode::PaperFaithful;
    MdsExponent exponent = MdsExponent::PlusHalf;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::size_t top_n = 20;
    std::size_t first_m = 5;
    std::string ranking = "absolute";
    bool prefix_curve = true;

    SvmParams svm() const {
        SvmParams p;
        p.C = C;
        if (gamma > 0) p.gamma.fixed = gamma;
        return p;
    }

    VariantConfig variant_config(Variant v) const {
        VariantConfig c;
        c.variant = v;
        c.d = d;
        c.k = k;
        c.inner_folds = inner_folds;
        c.outer_folds = outer_folds;
        c.svm = svm();
        c.mode = mode;
        c.seed = seed;
        c.workers = workers;
        return c;
    }
};

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError("config: bad value for " + key + ": '" + v + "'");
    return out;
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v + ",") {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return out;
}

inline std::string format_real(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

}  // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_number;
    try {
        if (key == "interactome") c.interactome = value;
        else if (key == "disease_genes") c.disease_genes = value;
        else if (key == "rr") c.rr = value;
        else if (key == "work_dir") c.work_dir = value;
        else if (key == "out_dir") c.out_dir = value;
        else if (key == "variants") {
            c.variants.clear();
            for (const auto& v : detail::split_list(value)) c.variants.push_back(parse_variant(v));
        } else if (key == "thresholds") {
            c.thresholds.clear();
            for (const auto& v : detail::split_list(value)) c.thresholds.push_back(parse_number<double>(key, v));
        } else if (key == "d") c.d = parse_number<std::size_t>(key, value);
        else if (key == "k") c.k = parse_number<std::size_t>(key, value);
        else if (key == "inner_folds") c.inner_folds = parse_number<std::size_t>(key, value);
        else if (key == "outer_folds") c.outer_folds = parse_number<std::size_t>(key, value);
        else if (key == "C") c.C = parse_number<double>(key, value);
        else if (key == "gamma") c.gamma = value == "scale" ? 0.0 : parse_number<double>(key, value);
        else if (key == "mode") c.mode = parse_selection_mode(value);
        else if (key == "exponent") {
            if (value == "0.5" || value == "+0.5") c.exponent = MdsExponent::PlusHalf;
            else if (value == "-0.5") c.exponent = MdsExponent::MinusHalf;
            else throw ConfigError("config: exponent must be 0.5 or -0.5");
        } else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "workers") c.workers = parse_number<std::size_t>(key, value);
        else if (key == "top_n") c.top_n = parse_number<std::size_t>(key, value);
        else if (key == "first_m") c.first_m = parse_number<std::size_t>(key, value);
        else if (key == "ranking") c.ranking = value;
        else if (key == "prefix_curve") {
            if (value != "true" && value != "false") throw ConfigError("config: prefix_curve must be true or false");
            c.prefix_curve = value == "true";
        } else throw ConfigError("config: unknown key '" + key + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline void load_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        auto t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(no) + ": expected key = value");
        set_config_value(c, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
}

inline void validate(const RunConfig& c, bool need_inputs = true) {
    if (need_inputs && (c.interactome.empty() || c.disease_genes.empty() || c.rr.empty()))
        throw ConfigError("config: interactome, disease_genes and rr paths are required");
    if (c.variants.empty()) throw ConfigError("config: no variants");
    if (c.thresholds.empty()) throw ConfigError("config: no thresholds");
    if (c.d > c.k) throw ConfigError("config: d=" + std::to_string(c.d) + " exceeds k=" + std::to_string(c.k));
    if (c.k == 0) throw ConfigError("config: k must be positive");
    if (c.inner_folds < 2 || c.outer_folds < 2) throw ConfigError("config: fold counts must be at least 2");
    if (!(c.C > 0)) throw ConfigError("config: C must be positive");
    if (c.gamma < 0) throw ConfigError("config: gamma must be positive or 'scale'");
    if (c.workers == 0) throw ConfigError("config: workers must be at least 1");
    if (c.ranking != "absolute" && c.ranking != "signed") throw ConfigError("config: ranking must be absolute or signed");
}

/// Every key, in a fixed order. Paths are stamped as given. Worker count is left
/// out so that outputs do not depend on it.
inline std::string serialize(const RunConfig& c) {
    using detail::format_real;
    std::ostringstream s;
    auto kv = [&](const char* k, const std::string& v) { s << "# " << k << " = " << v << '\n'; };
    s << "# " << kVersion << '\n';
    kv("interactome", c.interactome);
    kv("disease_genes", c.disease_genes);
    kv("rr", c.rr);
    std::string vs, ts;
    for (auto v : c.variants) vs += (vs.empty() ? "" : ",") + to_string(v);
    for (auto t : c.thresholds) ts += (ts.empty() ? "" : ",") + format_real(t);
    kv("variants", vs);
    kv("thresholds", ts);
    kv("d", std::to_string(c.d));
    kv("k", std::to_string(c.k));
    kv("inner_folds", std::to_string(c.inner_folds));
    kv("outer_folds", std::to_string(c.outer_folds));
    kv("C", format_real(c.C));
    kv("gamma", c.gamma > 0 ? format_real(c.gamma) : "scale");
    kv("mode", to_string(c.mode));
    kv("exponent", c.exponent == MdsExponent::PlusHalf ? "0.5" : "-0.5");
    kv("seed", std::to_string(c.seed));
    kv("top_n", std::to_string(c.top_n));
    kv("first_m", std::to_string(c.first_m));
    kv("ranking", c.ranking);
    kv("prefix_curve", c.prefix_curve ? "true" : "false");
    return s.str();
}

}  // namespace bse
