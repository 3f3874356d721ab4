#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "rggfpp/geometry.hpp"

namespace rggfpp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over a tag; used to name seed streams.
constexpr std::uint64_t stream_tag(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Counter-based seed split: the seed of replica `index` in stream `stream`
/// depends only on (root, stream, index), so replicas can be generated in any
/// order or on any thread and still reproduce.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                    std::uint64_t index) noexcept {
    return mix64(mix64(root ^ mix64(stream_tag(stream))) + mix64(index));
}

/// Uniform in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Per-edge uniform for the undirected edge {u, v}: symmetric in (u, v) and a
/// pure function of the seed, so weights never depend on traversal order.
constexpr double edge_uniform(std::uint64_t seed, std::uint64_t u, std::uint64_t v) noexcept {
    const std::uint64_t lo = u < v ? u : v;
    const std::uint64_t hi = u < v ? v : u;
    return to_unit(mix64(mix64(seed ^ mix64(lo)) ^ mix64(hi + 0x632be59bd9b4e019ULL)));
}

/// Poisson(mean) by inversion of u in [0,1). Small means walk up from 0;
/// large means start at the mode so no term underflows.
std::uint64_t poisson_quantile(double mean, double u);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    double uniform() { return to_unit(engine_()); }
    /// Uniform in (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }
    double standard_exponential() { return -std::log(uniform_pos()); }
    std::uint64_t poisson(double mean) { return poisson_quantile(mean, uniform()); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Uniform point of the ball B_r(0) in R^d.
    Point in_ball(int d, double r);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace rggfpp
