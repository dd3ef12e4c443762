#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bse/netio.hpp"

namespace testing_helpers {

inline std::string temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("bse_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

inline std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
    std::string path = dir + "/" + name;
    std::ofstream(path) << text;
    return path;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

/// Random connected graph on nodes 0..n-1: a random tree plus extra random edges.
inline std::vector<std::pair<std::size_t, std::size_t>> random_connected_edges(std::size_t n, std::size_t extra,
                                                                              std::mt19937_64& rng) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t v = 1; v < n; ++v) e.emplace_back(rng() % v, v);
    for (std::size_t i = 0; i < extra; ++i) {
        std::size_t a = rng() % n, b = rng() % n;
        if (a != b) e.emplace_back(a, b);
    }
    return e;
}

inline bse::InteractomeGraph graph_from(const std::vector<std::pair<std::size_t, std::size_t>>& e) {
    std::vector<std::pair<bse::GeneId, bse::GeneId>> g;
    for (auto [a, b] : e) g.emplace_back(a + 1, b + 1);  // gene IDs are positive
    return bse::InteractomeGraph::from_edges(g);
}

}  // namespace testing_helpers
