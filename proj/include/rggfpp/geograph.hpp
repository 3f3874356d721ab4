#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rggfpp/cell_grid.hpp"
#include "rggfpp/point_process.hpp"

namespace rggfpp {

using VertexId = std::uint32_t;

/// Compressed undirected adjacency; every edge is stored in both lists and
/// each list is sorted.
struct Adjacency {
    std::vector<std::size_t> offsets{0};
    std::vector<VertexId> targets;

    std::size_t vertex_count() const { return offsets.size() - 1; }
    std::size_t edge_count() const { return targets.size() / 2; }
    std::span<const VertexId> neighbors(VertexId v) const {
        return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }

    static Adjacency from_edges(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges);
};

struct ComponentInfo {
    std::vector<std::uint32_t> labels;  // label order = order of minimal vertex
    std::vector<std::size_t> sizes;
    std::optional<std::uint32_t> giant;  // empty only for the empty graph

    std::size_t giant_size() const { return giant ? sizes[*giant] : 0; }
};

ComponentInfo label_components(const Adjacency& adj);

/// BFS hop distance; nullopt when v is not reachable from u.
std::optional<std::uint32_t> graph_distance(const Adjacency& adj, VertexId u, VertexId v);

/// All hop distances from `source`; unreachable vertices are nullopt.
std::vector<std::optional<std::uint32_t>> hop_distances(const Adjacency& adj, VertexId source);

/// Number of self-avoiding paths with n edges starting at `source`, by DFS.
/// n is capped at 6.
std::uint64_t count_self_avoiding_paths(const Adjacency& adj, VertexId source, int n);

inline constexpr int kMaxPathLength = 6;

/// Gilbert disk graph: {u,v} is an edge iff 0 < |u - v| < r.
class Geograph {
public:
    Geograph(std::shared_ptr<const PointSet> points, double radius, Adjacency adj,
             std::vector<std::string> warnings);

    const PointSet& points() const { return *points_; }
    std::shared_ptr<const PointSet> shared_points() const { return points_; }
    double radius() const { return radius_; }
    int dim() const { return points_->dim(); }
    std::size_t vertex_count() const { return adj_.vertex_count(); }
    std::size_t edge_count() const { return adj_.edge_count(); }
    const Adjacency& adjacency() const { return adj_; }
    std::span<const VertexId> neighbors(VertexId v) const { return adj_.neighbors(v); }

    const ComponentInfo& components() const { return comps_; }
    bool in_giant(VertexId v) const { return comps_.giant && comps_.labels[v] == *comps_.giant; }
    std::vector<VertexId> giant_vertices() const;
    double giant_fraction() const;
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::shared_ptr<const PointSet> points_;
    double radius_;
    Adjacency adj_;
    ComponentInfo comps_;
    std::vector<std::string> warnings_;
};

/// Builds the disk graph with a cell hash of side r, scanning the 3^d
/// neighbouring cells of each point. Warns when r > L/10.
Geograph build_rgg(std::shared_ptr<const PointSet> ps, double r);
Geograph build_rgg(PointSet ps, double r);

/// Nearest giant-component vertex q(x), ties to the lexicographically
/// smallest coordinates. Holds its own reference to the point set.
class ClusterMap {
public:
    explicit ClusterMap(const Geograph& g);

    /// Throws SubcriticalError when the giant component is empty.
    VertexId nearest(std::span<const double> x) const;
    double distance_to_giant(std::span<const double> x) const;
    std::size_t giant_size() const { return grid_.item_count(); }

private:
    std::shared_ptr<const PointSet> points_;
    CellGrid grid_;
};

/// q(x) for a single query; builds a ClusterMap internally.
VertexId nearest_giant_vertex(const Geograph& g, std::span<const double> x);

/// Regular probe lattice on a box: centers lo + (i + 1/2) * pitch per axis.
struct ProbeGrid {
    int dim = 2;
    double pitch = 1.0;
    std::vector<double> coords;

    static ProbeGrid over(const Box& box, double pitch);
    std::size_t size() const { return coords.size() / static_cast<std::size_t>(dim); }
    std::span<const double> probe(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    double cell_volume() const;
};

struct ThetaEstimate {
    // Giant vertices per unit volume in the inner box.
    double vertex_density = 0.0;
    double vertex_density_halfwidth = 0.0;
    // vertex_density / lambda: fraction of sample points in the giant.
    double vertex_fraction = 0.0;
    // Fraction of probes x with a giant vertex in B_rho(x).
    double ball_hit_frequency = 0.0;
    double ball_hit_halfwidth = 0.0;
    double probe_radius = 0.0;
    std::size_t giant_in_inner = 0;
    std::size_t probes = 0;
    double inner_volume = 0.0;
};

/// Two distinct estimators of theta_r on the box shrunk by `inner_fraction`.
/// Half-widths are nominal 95% (Poisson count / binomial probe) bands.
ThetaEstimate estimate_theta(const Geograph& g, double inner_fraction, double probe_pitch = 0.0,
                             double probe_radius = 0.0);

struct StretchEstimate {
    std::vector<Point> directions;
    std::vector<double> radii;
    std::vector<std::vector<double>> table;  // [direction][radius] dist/s
    std::vector<double> mean_by_radius;
    double estimate = 0.0;  // mean at the largest radius
    double lower_bound = 0.0;  // 1/r
    bool bound_ok = true;  // every table entry >= 1/r - 1e-9
};

/// dist(q(o), q(s u)) / s for every direction u and radius s. Radii must fit
/// in the inner box (box shrunk by 1 - margin_fraction).
StretchEstimate estimate_stretch_factor(const Geograph& g, std::span<const Point> directions,
                                        std::span<const double> radii, double margin_fraction = 0.1);

/// True when B_s(x) contains no giant vertex.
bool ball_misses_giant(const ClusterMap& cmap, std::span<const double> x, double s);

/// Graph export: {"id","x","component"} per vertex then {"u","v"} per edge.
void write_graph_ndjson(const Geograph& g, std::ostream& out);

}  // namespace rggfpp
