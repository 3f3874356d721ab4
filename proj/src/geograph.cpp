#include "rggfpp/geograph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include <nlohmann/json.hpp>

#include "rggfpp/errors.hpp"
#include "rggfpp/union_find.hpp"

namespace rggfpp {

Adjacency Adjacency::from_edges(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges) {
    std::vector<std::vector<VertexId>> lists(n);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n || u == v) throw ParameterError("invalid edge");
        lists[u].push_back(v);
        lists[v].push_back(u);
    }
    Adjacency adj;
    adj.offsets.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        auto& l = lists[v];
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        adj.offsets[v + 1] = adj.offsets[v] + l.size();
        adj.targets.insert(adj.targets.end(), l.begin(), l.end());
    }
    return adj;
}

ComponentInfo label_components(const Adjacency& adj) {
    const std::size_t n = adj.vertex_count();
    UnionFind uf(n);
    for (VertexId u = 0; u < n; ++u) {
        for (VertexId v : adj.neighbors(u)) {
            if (u < v) uf.unite(u, v);
        }
    }
    ComponentInfo info;
    info.labels = uf.labels();
    for (std::uint32_t l : info.labels) {
        if (l >= info.sizes.size()) info.sizes.resize(l + 1, 0);
        ++info.sizes[l];
    }
    for (std::uint32_t l = 0; l < info.sizes.size(); ++l) {
        if (!info.giant || info.sizes[l] > info.sizes[*info.giant]) info.giant = l;
    }
    return info;
}

std::vector<std::optional<std::uint32_t>> hop_distances(const Adjacency& adj, VertexId source) {
    if (source >= adj.vertex_count()) throw ParameterError("invalid vertex id");
    std::vector<std::optional<std::uint32_t>> dist(adj.vertex_count());
    std::deque<VertexId> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const VertexId u = queue.front();
        queue.pop_front();
        for (VertexId v : adj.neighbors(u)) {
            if (!dist[v]) {
                dist[v] = *dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

std::optional<std::uint32_t> graph_distance(const Adjacency& adj, VertexId u, VertexId v) {
    if (u >= adj.vertex_count() || v >= adj.vertex_count()) throw ParameterError("invalid vertex id");
    if (u == v) return 0;
    std::vector<std::uint32_t> dist(adj.vertex_count(), UINT32_MAX);
    std::deque<VertexId> queue{u};
    dist[u] = 0;
    while (!queue.empty()) {
        const VertexId x = queue.front();
        queue.pop_front();
        for (VertexId y : adj.neighbors(x)) {
            if (dist[y] != UINT32_MAX) continue;
            dist[y] = dist[x] + 1;
            if (y == v) return dist[y];
            queue.push_back(y);
        }
    }
    return std::nullopt;
}

namespace {

std::uint64_t extend_paths(const Adjacency& adj, VertexId at, int remaining, std::vector<char>& on_path) {
    if (remaining == 0) return 1;
    std::uint64_t total = 0;
    for (VertexId v : adj.neighbors(at)) {
        if (on_path[v]) continue;
        on_path[v] = 1;
        total += extend_paths(adj, v, remaining - 1, on_path);
        on_path[v] = 0;
    }
    return total;
}

}  // namespace

std::uint64_t count_self_avoiding_paths(const Adjacency& adj, VertexId source, int n) {
    if (source >= adj.vertex_count()) throw ParameterError("invalid vertex id");
    if (n < 0) throw ParameterError("path length must be non-negative");
    if (n > kMaxPathLength) throw ParameterError("path length above the enumeration guard (6)");
    std::vector<char> on_path(adj.vertex_count(), 0);
    on_path[source] = 1;
    return extend_paths(adj, source, n, on_path);
}

Geograph::Geograph(std::shared_ptr<const PointSet> points, double radius, Adjacency adj,
                   std::vector<std::string> warnings)
    : points_(std::move(points)), radius_(radius), adj_(std::move(adj)), warnings_(std::move(warnings)) {
    if (adj_.vertex_count() != points_->size()) throw IntegrityError("adjacency size differs from point count");
    comps_ = label_components(adj_);
}

std::vector<VertexId> Geograph::giant_vertices() const {
    std::vector<VertexId> out;
    if (!comps_.giant) return out;
    out.reserve(comps_.giant_size());
    for (VertexId v = 0; v < vertex_count(); ++v) {
        if (comps_.labels[v] == *comps_.giant) out.push_back(v);
    }
    return out;
}

double Geograph::giant_fraction() const {
    if (vertex_count() == 0) return 0.0;
    return static_cast<double>(comps_.giant_size()) / static_cast<double>(vertex_count());
}

Geograph build_rgg(std::shared_ptr<const PointSet> ps, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("radius must be positive");
    std::vector<std::string> warnings;
    if (r > ps->box().half_width / 10.0) {
        warnings.push_back("radius exceeds L/10; boundary effects dominate");
    }
    const CellGrid grid(*ps, r);
    const double r2 = r * r;
    const std::size_t n = ps->size();
    Adjacency adj;
    adj.offsets.assign(n + 1, 0);
    std::vector<VertexId> row;
    for (VertexId i = 0; i < n; ++i) {
        const auto p = ps->point(i);
        row.clear();
        grid.for_each_near(p, 1, [&](std::uint32_t j) {
            if (j != i && squared_distance(p, ps->point(j)) < r2) row.push_back(j);
        });
        std::sort(row.begin(), row.end());
        adj.targets.insert(adj.targets.end(), row.begin(), row.end());
        adj.offsets[i + 1] = adj.targets.size();
    }
    return Geograph(std::move(ps), r, std::move(adj), std::move(warnings));
}

Geograph build_rgg(PointSet ps, double r) {
    return build_rgg(std::make_shared<const PointSet>(std::move(ps)), r);
}

ClusterMap::ClusterMap(const Geograph& g)
    : points_(g.shared_points()),
      grid_(*points_, g.radius(), std::optional<std::span<const std::uint32_t>>(g.giant_vertices())) {
    if (grid_.item_count() == 0) throw SubcriticalError("giant component is empty (subcritical sample)");
}

VertexId ClusterMap::nearest(std::span<const double> x) const {
    const auto v = grid_.nearest(x);
    if (!v) throw SubcriticalError("giant component is empty (subcritical sample)");
    return *v;
}

double ClusterMap::distance_to_giant(std::span<const double> x) const {
    return distance(points_->point(nearest(x)), x);
}

VertexId nearest_giant_vertex(const Geograph& g, std::span<const double> x) {
    return ClusterMap(g).nearest(x);
}

ProbeGrid ProbeGrid::over(const Box& box, double pitch) {
    if (!(pitch > 0.0)) throw ParameterError("probe pitch must be positive");
    box.validate();
    ProbeGrid grid;
    grid.dim = box.dim;
    grid.pitch = pitch;
    const auto per_axis = static_cast<std::size_t>(std::floor(2.0 * box.half_width / pitch + 1e-9));
    if (per_axis == 0) return grid;
    std::size_t total = 1;
    for (int a = 0; a < box.dim; ++a) total *= per_axis;
    grid.coords.resize(total * static_cast<std::size_t>(box.dim));
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rest = k;
        for (int a = 0; a < box.dim; ++a) {
            const std::size_t i = rest % per_axis;
            rest /= per_axis;
            grid.coords[k * box.dim + a] = box.lower(a) + (static_cast<double>(i) + 0.5) * pitch;
        }
    }
    return grid;
}

double ProbeGrid::cell_volume() const { return std::pow(pitch, dim); }

ThetaEstimate estimate_theta(const Geograph& g, double inner_fraction, double probe_pitch,
                             double probe_radius) {
    if (!(inner_fraction > 0.0 && inner_fraction < 1.0)) throw ParameterError("inner_fraction must lie in (0,1)");
    if (g.components().giant_size() == 0) throw SubcriticalError("giant component is empty (subcritical sample)");
    if (probe_pitch <= 0.0) probe_pitch = g.radius() / 4.0;
    if (probe_radius <= 0.0) probe_radius = g.radius();
    const Box inner = g.points().box().shrunk(inner_fraction);
    ThetaEstimate est;
    est.probe_radius = probe_radius;
    est.inner_volume = inner.volume();
    for (VertexId v : g.giant_vertices()) {
        if (inner.contains(g.points().point(v))) ++est.giant_in_inner;
    }
    est.vertex_density = static_cast<double>(est.giant_in_inner) / est.inner_volume;
    est.vertex_density_halfwidth = 1.96 * std::sqrt(static_cast<double>(est.giant_in_inner)) / est.inner_volume;
    est.vertex_fraction = est.vertex_density / g.points().intensity();

    const ClusterMap cmap(g);
    const ProbeGrid probes = ProbeGrid::over(inner, probe_pitch);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        if (!ball_misses_giant(cmap, probes.probe(k), probe_radius)) ++hits;
    }
    est.probes = probes.size();
    if (est.probes > 0) {
        const double p = static_cast<double>(hits) / static_cast<double>(est.probes);
        est.ball_hit_frequency = p;
        est.ball_hit_halfwidth = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(est.probes));
    }
    return est;
}

StretchEstimate estimate_stretch_factor(const Geograph& g, std::span<const Point> directions,
                                        std::span<const double> radii, double margin_fraction) {
    if (directions.empty() || radii.empty()) throw ParameterError("directions and radii must be non-empty");
    if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0) {
        throw ParameterError("radii must be positive and increasing");
    }
    const Box& box = g.points().box();
    const double inner_radius = box.half_width * (1.0 - margin_fraction);
    if (radii.back() > inner_radius) throw ParameterError("largest radius exceeds the inner box");
    const ClusterMap cmap(g);
    const int d = g.dim();
    const Point origin(box.center);
    const VertexId q0 = cmap.nearest(origin);
    const auto hops = hop_distances(g.adjacency(), q0);

    StretchEstimate est;
    est.directions.assign(directions.begin(), directions.end());
    est.radii.assign(radii.begin(), radii.end());
    est.lower_bound = 1.0 / g.radius();
    est.mean_by_radius.assign(radii.size(), 0.0);
    Point target(d);
    for (const Point& u : directions) {
        if (u.size() != static_cast<std::size_t>(d)) throw ParameterError("direction has wrong dimension");
        std::vector<double> row;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            for (int a = 0; a < d; ++a) target[a] = origin[a] + radii[j] * u[a];
            const auto h = hops[cmap.nearest(target)];
            if (!h) throw IntegrityError("giant vertices are not mutually reachable");
            const double ratio = static_cast<double>(*h) / radii[j];
            row.push_back(ratio);
            est.mean_by_radius[j] += ratio / static_cast<double>(directions.size());
            if (ratio < est.lower_bound - 1e-9) est.bound_ok = false;
        }
        est.table.push_back(std::move(row));
    }
    est.estimate = est.mean_by_radius.back();
    return est;
}

bool ball_misses_giant(const ClusterMap& cmap, std::span<const double> x, double s) {
    return !(cmap.distance_to_giant(x) < s);
}

void write_graph_ndjson(const Geograph& g, std::ostream& out) {
    using nlohmann::json;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const auto p = g.points().point(v);
        json rec = {{"id", v},
                    {"x", std::vector<double>(p.begin(), p.end())},
                    {"component", g.components().labels[v]}};
        out << rec.dump() << '\n';
    }
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        for (VertexId v : g.neighbors(u)) {
            if (u < v) out << json{{"u", u}, {"v", v}}.dump() << '\n';
        }
    }
}

}  // namespace rggfpp
