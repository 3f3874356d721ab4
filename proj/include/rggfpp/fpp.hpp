#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rggfpp/geograph.hpp"

namespace rggfpp {

enum class PassageFamily { bernoulli, exponential, constant, uniform };

/// Law of a single edge passage time tau >= 0.
/// bernoulli(p): P(tau = 0) = p, tau = 1 otherwise, i.e. tau ~ Ber(1 - p).
struct PassageSpec {
    PassageFamily family = PassageFamily::exponential;
    double p = 0.0;
    double rate = 1.0;
    double c = 1.0;
    double a = 0.0;
    double b = 1.0;

    static PassageSpec bernoulli(double p);
    static PassageSpec exponential(double rate);
    static PassageSpec constant(double c);
    static PassageSpec uniform(double a, double b);

    /// tau as a function of a uniform in [0,1). Monotone in u.
    double quantile(double u) const;
    double mean() const;
    double zero_atom() const;
    void validate() const;
    std::string family_name() const;

    bool operator==(const PassageSpec&) const = default;
};

void to_json(nlohmann::json& j, const PassageSpec& s);
void from_json(const nlohmann::json& j, PassageSpec& s);

/// Weights aligned with Adjacency::targets: entry k is the weight of the
/// directed copy of its edge, and both copies carry the same value.
using EdgeWeights = std::vector<double>;

/// tau_e = spec.quantile(U_e) with U_e a hash of (seed, min id, max id).
EdgeWeights assign_passage_times(const Adjacency& adj, const PassageSpec& spec, std::uint64_t seed);
EdgeWeights assign_passage_times(const Geograph& g, const PassageSpec& spec, std::uint64_t seed);

inline constexpr double kUnreached = std::numeric_limits<double>::infinity();

/// Binary-heap Dijkstra. Unreached vertices hold kUnreached. A negative
/// weight raises IntegrityError. Stops early once `target` is settled.
std::vector<double> shortest_times(const Adjacency& adj, std::span<const double> weights, VertexId source,
                                   std::optional<VertexId> target = std::nullopt);

/// First-passage times from a source vertex. Keeps a pointer to the graph,
/// which must outlive it.
class PassageField {
public:
    PassageField(const Geograph& g, EdgeWeights weights, VertexId source, std::vector<double> times);

    const Geograph& graph() const { return *g_; }
    const EdgeWeights& weights() const { return weights_; }
    VertexId source() const { return source_; }
    std::optional<double> time(VertexId v) const;
    bool reached(VertexId v) const { return times_[v] != kUnreached; }
    /// Raw times with kUnreached for unreached vertices.
    const std::vector<double>& raw_times() const { return times_; }

private:
    const Geograph* g_;
    EdgeWeights weights_;
    VertexId source_;
    std::vector<double> times_;
};

PassageField first_passage(const Geograph& g, EdgeWeights weights, VertexId source);

/// T(q(x), q(y)); exactly symmetric in (x, y).
double passage_between(const Geograph& g, std::span<const double> weights, const ClusterMap& cmap,
                       std::span<const double> x, std::span<const double> y);

struct GrowthSet {
    std::vector<VertexId> vertices;  // {v : T(v) <= t}, ascending ids
    std::size_t probes = 0;
    std::size_t probes_reached = 0;
    double volume = 0.0;  // probes_reached * pitch^d
};

/// H_t: reached vertices plus the probe-grid volume of {x : T(q(x)) <= t}
/// inside `region`.
GrowthSet ball_at_time(const PassageField& field, const ClusterMap& cmap, double t, const Box& region,
                       double pitch);

/// Ordered jump times s_k and jump locations z_k of the growth process.
class GrowthTrace {
public:
    GrowthTrace(int dim, std::vector<double> s, std::vector<double> z, std::vector<VertexId> ids,
                std::size_t ties);

    std::size_t size() const { return s_.size(); }
    int dim() const { return dim_; }
    double s(std::size_t k) const { return s_[k]; }
    std::span<const double> phi(std::size_t k) const {
        return {z_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    /// s_k - s_{k-1}; k >= 1.
    double psi(std::size_t k) const { return s_[k] - s_[k - 1]; }
    VertexId vertex(std::size_t k) const { return ids_[k]; }
    /// Number of k >= 1 with s_k == s_{k-1}.
    std::size_t tie_count() const { return ties_; }

private:
    int dim_;
    std::vector<double> s_;
    std::vector<double> z_;
    std::vector<VertexId> ids_;
    std::size_t ties_;
};

/// Reached vertices sorted stably by (T, vertex id).
GrowthTrace growth_trace(const PassageField& field);

struct A1Check {
    bool satisfied = false;
    double atom = 0.0;
    double threshold = 0.0;
};
A1Check check_A1(const PassageSpec& spec, double lambda, double r, int d);

struct A2Check {
    bool satisfied = false;
    double required = 0.0;  // moments of order > 2d + 2 must be finite
    double moment_order = 0.0;  // +inf: every moment is finite
};
A2Check check_A2(const PassageSpec& spec, int d);

/// vertex_id, x0..x{d-1}, T ("unreached" when not reached).
void write_passage_csv(const PassageField& field, std::ostream& out);
/// k, s_k, psi_k, z0..z{d-1}.
void write_trace_csv(const GrowthTrace& trace, std::ostream& out);

}  // namespace rggfpp
