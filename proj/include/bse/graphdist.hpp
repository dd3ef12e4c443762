#pragma once

// All-pairs hop distances over a connected interactome, node degrees, and the
// binary distance cache.
//
// Cache layout (all integers little-endian):
//   "BSED" | 0x01 | n:u32 | n*n hop counts:u16, row-major | checksum:u64
// where checksum is the sum of all hop counts modulo 2^64.

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "netio.hpp"

namespace bse {

using Hops = std::uint16_t;

/// Dense symmetric n x n hop-count matrix, row-major.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0) {}

    std::size_t size() const { return n_; }
    Hops operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    Hops& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

    std::span<const Hops> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    std::span<Hops> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
    const std::vector<Hops>& data() const { return data_; }

    std::uint64_t checksum() const {
        std::uint64_t s = 0;
        for (Hops h : data_) s += h;
        return s;
    }

    Hops max_hop() const { return data_.empty() ? 0 : *std::max_element(data_.begin(), data_.end()); }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Hops> data_;
};

using DegreeVector = std::vector<std::size_t>;

inline DegreeVector node_degrees(const InteractomeGraph& g) {
    DegreeVector deg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) deg[i] = g.adjacency[i].size();
    return deg;
}

/// Single-source BFS into `out` (length n). Unreached nodes are an error because
/// callers are expected to pass a connected graph.
inline void bfs_hops(const InteractomeGraph& g, std::size_t source, std::span<Hops> out,
                     std::vector<NodeIndex>& queue) {
    constexpr Hops unseen = std::numeric_limits<Hops>::max();
    std::fill(out.begin(), out.end(), unseen);
    out[source] = 0;
    queue.assign(1, static_cast<NodeIndex>(source));
    std::size_t reached = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        NodeIndex u = queue[h];
        Hops next = static_cast<Hops>(out[u] + 1);
        for (NodeIndex v : g.adjacency[u]) {
            if (out[v] != unseen) continue;
            // unseen doubles as the overflow sentinel: a real distance of 65535 cannot be stored
            if (next == unseen) throw Error("hop count exceeds 16-bit range");
            out[v] = next;
            queue.push_back(v);
            ++reached;
        }
    }
    if (reached != g.size()) throw Error("graph is disconnected; pass the largest connected component");
}

/// Dense APSP by one BFS per source, parallel over sources. Rows are disjoint so
/// the result does not depend on the worker count.
inline DistanceMatrix all_pairs_shortest_paths(const InteractomeGraph& g, std::size_t workers = 1) {
    if (!is_connected(g)) throw Error("all_pairs_shortest_paths: graph is disconnected");
    DistanceMatrix d(g.size());
    const std::size_t n = g.size();
    const std::size_t chunks = std::min<std::size_t>(n, std::max<std::size_t>(1, workers) * 8);
    parallel_for(chunks, workers, [&](std::size_t c) {
        std::vector<NodeIndex> queue;
        queue.reserve(n);
        for (std::size_t s = c * n / chunks; s < (c + 1) * n / chunks; ++s) bfs_hops(g, s, d.row(s), queue);
    });
    return d;
}

/// Row-on-demand distances for runs that cannot hold the dense matrix.
class StreamingDistances {
public:
    explicit StreamingDistances(const InteractomeGraph& g) : g_(&g) {
        if (!is_connected(g)) throw Error("StreamingDistances: graph is disconnected");
    }
    std::size_t size() const { return g_->size(); }
    std::vector<Hops> row(std::size_t i) const {
        std::vector<Hops> r(g_->size());
        std::vector<NodeIndex> queue;
        bfs_hops(*g_, i, r, queue);
        return r;
    }

private:
    const InteractomeGraph* g_;
};

// ---------------------------------------------------------------------------
// cache

namespace detail {
template <class T>
void put_le(std::ostream& out, T v) {
    std::array<char, sizeof(T)> b{};
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
    out.write(b.data(), b.size());
}
template <class T>
bool get_le(std::istream& in, T& v) {
    std::array<unsigned char, sizeof(T)> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) return false;
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    v = static_cast<T>(x);
    return true;
}
}  // namespace detail

inline constexpr std::array<char, 4> kCacheMagic = {'B', 'S', 'E', 'D'};
inline constexpr std::uint8_t kCacheVersion = 0x01;

inline void write_distance_cache(const DistanceMatrix& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(kCacheMagic.data(), kCacheMagic.size());
    out.put(static_cast<char>(kCacheVersion));
    if (d.size() > std::numeric_limits<std::uint32_t>::max()) throw Error("node count exceeds 32-bit range");
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.size()));
    std::vector<char> buf;
    buf.reserve(2 * d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        buf.clear();
        for (Hops h : d.row(i)) {
            buf.push_back(static_cast<char>(h & 0xFF));
            buf.push_back(static_cast<char>(h >> 8));
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    detail::put_le<std::uint64_t>(out, d.checksum());
    if (!out) throw Error("write failed: " + path);
}

enum class CacheStatus { Ok, Missing, Corrupt };

struct CacheRead {
    CacheStatus status = CacheStatus::Missing;
    std::string reason;
    DistanceMatrix matrix;
};

/// Reads and validates a cache file. Never throws for bad content; the status says why.
inline CacheRead read_distance_cache(const std::string& path) {
    CacheRead r;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        r.reason = "missing";
        return r;
    }
    r.status = CacheStatus::Corrupt;
    std::array<char, 4> magic{};
    std::uint8_t version = 0;
    std::uint32_t n = 0;
    if (!in.read(magic.data(), 4) || magic != kCacheMagic) {
        r.reason = "bad magic";
        return r;
    }
    if (!detail::get_le(in, version) || version != kCacheVersion) {
        r.reason = "unsupported version";
        return r;
    }
    if (!detail::get_le(in, n)) {
        r.reason = "truncated header";
        return r;
    }
    in.seekg(0, std::ios::end);
    const auto total = static_cast<std::uint64_t>(in.tellg());
    if (total != 9ULL + 2ULL * n * n + 8ULL) {
        r.reason = "size does not match node count";
        return r;
    }
    in.seekg(9);
    DistanceMatrix d(n);
    std::vector<unsigned char> buf(2ULL * n);
    for (std::size_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        auto row = d.row(i);
        for (std::size_t j = 0; j < n; ++j) row[j] = static_cast<Hops>(buf[2 * j] | (buf[2 * j + 1] << 8));
    }
    std::uint64_t stored = 0;
    if (!in || !detail::get_le(in, stored)) {
        r.reason = "truncated body";
        return r;
    }
    if (stored != d.checksum()) {
        r.reason = "checksum mismatch";
        return r;
    }
    r.status = CacheStatus::Ok;
    r.matrix = std::move(d);
    return r;
}

}  // namespace bse
