#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace bse {

inline constexpr std::string_view kVersion = "bse-0.1.0";

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending row (0 when unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// logging

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Silent = 3 };

namespace detail {
inline std::atomic<int>& log_threshold() {
    static std::atomic<int> level{static_cast<int>(LogLevel::Warn)};
    return level;
}
inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

inline void set_log_level(LogLevel level) { detail::log_threshold() = static_cast<int>(level); }

inline void log(LogLevel level, std::string_view msg) {
    if (static_cast<int>(level) < detail::log_threshold().load()) return;
    static constexpr const char* tags[] = {"debug", "info", "warn"};
    std::lock_guard<std::mutex> lock(detail::log_mutex());
    std::cerr << "[bse " << tags[static_cast<int>(level)] << "] " << msg << '\n';
}

inline void warn(std::string_view msg) { log(LogLevel::Warn, msg); }
inline void info(std::string_view msg) { log(LogLevel::Info, msg); }

// ---------------------------------------------------------------------------
// seeds and random numbers
//
// All randomness flows from a root seed. Child seeds are derived from the parent,
// a component tag and integer indices, so any single cell can be regenerated alone.
// Only the engine (mt19937_64, fully specified by the standard) is taken from the
// library; the index/shuffle helpers below are written out so results do not depend
// on the standard library's distribution implementations.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                                 std::initializer_list<std::uint64_t> indices = {}) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the tag
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::uint64_t s = splitmix64(parent ^ splitmix64(h));
    for (std::uint64_t i : indices) s = splitmix64(s ^ splitmix64(i + 0x632BE59BD9B4E019ULL));
    return s;
}

using Rng = std::mt19937_64;

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

// ---------------------------------------------------------------------------
// parallelism

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index runs exactly once;
/// callers write results into per-index slots so the outcome is independent of scheduling.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_index = n;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    // keep the lowest failing index so the reported error is scheduling-independent
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (i < failed_index) {
                        failed_index = i;
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace bse
