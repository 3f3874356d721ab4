#include "rggfpp/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rggfpp/errors.hpp"
#include "rggfpp/io.hpp"
#include "rggfpp/parallel.hpp"
#include "rggfpp/point_process.hpp"
#include "rggfpp/rng.hpp"
#include "rggfpp/stats.hpp"
#include "rggfpp/union_find.hpp"

namespace rggfpp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double range_over_median(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / stats::median(v);
}

std::vector<double> finite_only(std::span<const double> v) {
    std::vector<double> out;
    for (double x : v) {
        if (std::isfinite(x)) out.push_back(x);
    }
    return out;
}
}  // namespace

double ShapeConfig::resolved_half_width(double s_max) const {
    if (half_width > 0.0) return half_width;
    return (s_max + 2.0 * r) / (1.0 - margin);
}

void ShapeConfig::validate() const {
    if (!(lambda > 0.0) || !(r > 0.0) || d < 2) throw ParameterError("shape: need lambda > 0, r > 0, d >= 2");
    if (!(margin >= 0.0 && margin < 1.0)) throw ParameterError("shape: margin must lie in [0,1)");
    if (!(min_giant_fraction >= 0.0 && min_giant_fraction <= 1.0)) {
        throw ParameterError("shape: min_giant_fraction must lie in [0,1]");
    }
    if (!rotation.empty() && rotation.size() != static_cast<std::size_t>(d * d)) {
        throw ParameterError("shape: rotation must be d*d");
    }
    passage.validate();
}

double ShapeProfile::spread(std::size_t j) const {
    std::vector<double> means;
    for (const auto& per_seed : samples) {
        std::vector<double> col;
        for (const auto& row : per_seed) col.push_back(row[j]);
        means.push_back(stats::mean(finite_only(col)));
    }
    return range_over_median(means);
}

namespace {

struct Replica {
    std::shared_ptr<const Geograph> graph;
    bool subcritical = false;
};

Replica make_replica(const ShapeConfig& cfg, double L, std::uint64_t point_seed) {
    PointSet ps = sample_ppp(cfg.lambda, Box::centered(cfg.d, L), point_seed);
    if (!cfg.rotation.empty()) ps = rotate(ps, cfg.rotation);
    auto g = std::make_shared<const Geograph>(build_rgg(std::move(ps), cfg.r));
    const bool sub = g->components().giant_size() == 0 || g->giant_fraction() < cfg.min_giant_fraction;
    return {std::move(g), sub};
}

}  // namespace

ShapeProfile directional_constants(const ShapeConfig& cfg, std::span<const Point> directions,
                                   std::span<const double> s_list, std::size_t n_seeds) {
    cfg.validate();
    if (directions.empty() || s_list.empty() || n_seeds == 0) {
        throw ParameterError("shape: need directions, radii and seeds");
    }
    if (s_list.front() <= 0.0 || !std::is_sorted(s_list.begin(), s_list.end())) {
        throw ParameterError("shape: s_list must be positive and increasing");
    }
    const double L = cfg.resolved_half_width(s_list.back());
    if (s_list.back() > L * (1.0 - cfg.margin) + 1e-12) {
        throw ParameterError("shape: largest s exceeds the inner box");
    }
    for (const auto& u : directions) {
        if (u.size() != static_cast<std::size_t>(cfg.d)) throw ParameterError("shape: direction dimension");
    }

    ShapeProfile prof;
    prof.directions.assign(directions.begin(), directions.end());
    prof.s_list.assign(s_list.begin(), s_list.end());
    prof.seeds = n_seeds;
    const auto a1 = check_A1(cfg.passage, cfg.lambda, cfg.r, cfg.d);
    if (!a1.satisfied) {
        prof.warnings.push_back("A1 violated: P(tau=0)=" + format_double(a1.atom) +
                                " >= " + format_double(a1.threshold));
    }
    if (!check_A2(cfg.passage, cfg.d).satisfied) prof.warnings.push_back("A2 violated");

    std::optional<Replica> shared;
    if (cfg.mode == ShapeMode::quenched) shared = make_replica(cfg, L, derive_seed(cfg.seed, "shape.points", 0));

    const std::size_t nd = directions.size();
    const std::size_t ns = s_list.size();
    std::vector<std::vector<double>> rows(nd * n_seeds);
    std::vector<char> sub(nd * n_seeds, 0);
    parallel_for(nd * n_seeds, cfg.threads, [&](std::size_t task) {
        const Replica rep = shared ? *shared : make_replica(cfg, L, derive_seed(cfg.seed, "shape.points", task));
        if (rep.subcritical) {
            rows[task].assign(ns, kNaN);
            sub[task] = 1;
            return;
        }
        const Geograph& g = *rep.graph;
        const ClusterMap cmap(g);
        const Point origin(cfg.d, 0.0);
        const auto w = assign_passage_times(g, cfg.passage, derive_seed(cfg.seed, "shape.weights", task));
        const auto times = shortest_times(g.adjacency(), w, cmap.nearest(origin));
        const Point& u = directions[task / n_seeds];
        Point target(cfg.d);
        for (std::size_t j = 0; j < ns; ++j) {
            for (int a = 0; a < cfg.d; ++a) target[a] = s_list[j] * u[a];
            rows[task].push_back(times[cmap.nearest(target)] / s_list[j]);
        }
    });

    prof.subcritical = static_cast<std::size_t>(std::count(sub.begin(), sub.end(), 1));
    if (static_cast<double>(prof.subcritical) > cfg.subcritical_quota * static_cast<double>(sub.size())) {
        throw SubcriticalQuotaError("shape: " + std::to_string(prof.subcritical) + " of " +
                                    std::to_string(sub.size()) +
                                    " replicas subcritical (giant fraction below " +
                                    format_double(cfg.min_giant_fraction) + ")");
    }
    if (prof.subcritical > 0) {
        prof.warnings.push_back(std::to_string(prof.subcritical) + " subcritical replicas excluded");
    }

    prof.samples.resize(nd);
    prof.mu_by_s.assign(nd, std::vector<double>(ns, 0.0));
    for (std::size_t u = 0; u < nd; ++u) {
        for (std::size_t i = 0; i < n_seeds; ++i) prof.samples[u].push_back(rows[u * n_seeds + i]);
        for (std::size_t j = 0; j < ns; ++j) {
            std::vector<double> col;
            for (const auto& row : prof.samples[u]) col.push_back(row[j]);
            const auto ok = finite_only(col);
            prof.mu_by_s[u][j] = stats::mean(ok);
            if (j + 1 == ns) {
                prof.mu.push_back(stats::mean(ok));
                prof.mu_se.push_back(stats::standard_error(ok));
            }
        }
    }
    prof.isotropy = range_over_median(prof.mu);
    prof.phi = 1.0 / stats::median(prof.mu);
    return prof;
}

double bootstrap_spread_fraction(const ShapeProfile& profile, std::size_t j_early, std::size_t j_late,
                                 std::size_t resamples, std::uint64_t seed) {
    if (j_early >= profile.s_list.size() || j_late >= profile.s_list.size()) {
        throw ParameterError("bootstrap: radius index out of range");
    }
    Rng rng(seed);
    std::size_t wins = 0;
    const std::size_t nd = profile.samples.size();
    std::vector<double> early(nd), late(nd);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t u = 0; u < nd; ++u) {
            const auto& seeds = profile.samples[u];
            double se = 0.0, sl = 0.0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                const auto& row = seeds[rng.below(seeds.size())];
                if (!std::isfinite(row[j_early])) continue;
                se += row[j_early];
                sl += row[j_late];
                ++n;
            }
            early[u] = n ? se / static_cast<double>(n) : kNaN;
            late[u] = n ? sl / static_cast<double>(n) : kNaN;
        }
        if (range_over_median(late) < range_over_median(early)) ++wins;
    }
    return resamples ? static_cast<double>(wins) / static_cast<double>(resamples) : 0.0;
}

ShapeError shape_error(const ProbeGrid& probes, std::span<const char> reached, std::span<const double> center,
                       double radius, const Box& region) {
    if (!(radius > 0.0)) throw ParameterError("shape_error: radius must be positive");
    ShapeError e;
    const double room = region.distance_to_boundary(center);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto x = probes.probe(k);
        const double rel = distance(x, center) / radius;
        if (reached[k]) {
            ++e.reached_probes;
            e.eps_out = std::max(e.eps_out, rel - 1.0);
            if (region.distance_to_boundary(x) < probes.pitch) e.truncated = true;
        } else if (rel < 1.0) {
            e.eps_in = std::max(e.eps_in, 1.0 - rel);
        }
    }
    if (e.reached_probes == 0) throw ParameterError("shape_error: reached set is empty");
    if (radius > room) e.truncated = true;
    e.eps = std::max(e.eps_in, e.eps_out);
    return e;
}

std::vector<double> probe_times(const PassageField& field, const ClusterMap& cmap, const ProbeGrid& probes) {
    std::vector<double> out(probes.size());
    const auto& times = field.raw_times();
    for (std::size_t k = 0; k < probes.size(); ++k) out[k] = times[cmap.nearest(probes.probe(k))];
    return out;
}

ShapeError shape_error_from_times(const ProbeGrid& probes, std::span<const double> times,
                                  std::span<const double> center, double phi, double t, const Box& region) {
    std::vector<char> reached(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) reached[k] = times[k] <= t;
    return shape_error(probes, reached, center, phi * t, region);
}

ShapeError shape_error(const PassageField& field, const ClusterMap& cmap, double phi, double t, const Box& region,
                       double pitch) {
    const ProbeGrid probes = ProbeGrid::over(region, pitch);
    const auto times = probe_times(field, cmap, probes);
    return shape_error_from_times(probes, times, region.center, phi, t, region);
}

double pc_lower_bound(double lambda, double r, int d) {
    if (!(lambda > 0.0) || !(r > 0.0) || d < 1) throw ParameterError("pc_lower_bound: parameters must be positive");
    return 1.0 / (unit_ball_volume(d) * std::pow(r, d) * lambda);
}

namespace {
UnionFind open_clusters(const Geograph& g, double p, std::uint64_t weight_seed) {
    UnionFind uf(g.vertex_count());
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        if (!g.in_giant(u)) continue;
        for (VertexId v : g.neighbors(u)) {
            if (u < v && edge_uniform(weight_seed, u, v) < p) uf.unite(u, v);
        }
    }
    return uf;
}
}  // namespace

double open_cluster_fraction(const Geograph& g, double p, std::uint64_t weight_seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0,1]");
    const std::size_t giant = g.components().giant_size();
    if (giant == 0) return 0.0;
    UnionFind uf = open_clusters(g, p, weight_seed);
    std::vector<std::size_t> size(g.vertex_count(), 0);
    std::size_t best = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (g.in_giant(v)) best = std::max(best, ++size[uf.find(v)]);
    }
    return static_cast<double>(best) / static_cast<double>(giant);
}

bool open_subgraph_is_giant(const Geograph& g, double p, std::uint64_t weight_seed) {
    return g.components().giant_size() > 0 && open_cluster_fraction(g, p, weight_seed) == 1.0;
}

std::vector<PercolationReport> percolation_sweep(const PercolationConfig& cfg, std::span<const double> p_grid,
                                                 std::span<const double> box_sizes, std::size_t n_seeds) {
    if (p_grid.empty() || box_sizes.empty() || n_seeds == 0) throw ParameterError("perc: empty grid");
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("perc: p must lie in [0,1]");
    }
    const double threshold = pc_lower_bound(cfg.lambda, cfg.r, cfg.d);
    const std::size_t nb = box_sizes.size();
    // frac[b * n_seeds + i][pi]
    std::vector<std::vector<double>> frac(nb * n_seeds);
    parallel_for(nb * n_seeds, cfg.threads, [&](std::size_t task) {
        const Geograph g = build_rgg(
            sample_ppp(cfg.lambda, Box::centered(cfg.d, box_sizes[task / n_seeds]),
                       derive_seed(cfg.seed, "perc.points", task)),
            cfg.r);
        const std::uint64_t ws = derive_seed(cfg.seed, "perc.weights", task);
        for (double p : p_grid) frac[task].push_back(open_cluster_fraction(g, p, ws));
    });
    std::vector<PercolationReport> out;
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        PercolationReport rep;
        rep.p = p_grid[pi];
        rep.threshold = threshold;
        rep.box_sizes.assign(box_sizes.begin(), box_sizes.end());
        rep.fractions.resize(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            for (std::size_t i = 0; i < n_seeds; ++i) rep.fractions[b].push_back(frac[b * n_seeds + i][pi]);
            rep.median_fraction.push_back(stats::median(rep.fractions[b]));
        }
        out.push_back(std::move(rep));
    }
    return out;
}

PercolationReport bond_percolation(const PercolationConfig& cfg, double p, std::span<const double> box_sizes,
                                   std::size_t n_seeds) {
    const double grid[1] = {p};
    return percolation_sweep(cfg, grid, box_sizes, n_seeds).front();
}

void write_profile_csv(const ShapeProfile& profile, std::ostream& out) {
    const std::size_t d = profile.directions.empty() ? 0 : profile.directions.front().size();
    std::vector<std::string> row{"direction"};
    for (std::size_t a = 0; a < d; ++a) row.push_back("u" + std::to_string(a));
    for (const char* c : {"s", "mu", "se", "n"}) row.emplace_back(c);
    write_csv_row(out, row);
    for (std::size_t u = 0; u < profile.directions.size(); ++u) {
        for (std::size_t j = 0; j < profile.s_list.size(); ++j) {
            std::vector<double> col;
            for (const auto& r : profile.samples[u]) col.push_back(r[j]);
            const auto ok = finite_only(col);
            row.clear();
            row.push_back(std::to_string(u));
            for (double x : profile.directions[u]) row.push_back(format_double(x));
            row.push_back(format_double(profile.s_list[j]));
            row.push_back(format_double(stats::mean(ok)));
            row.push_back(format_double(stats::standard_error(ok)));
            row.push_back(std::to_string(ok.size()));
            write_csv_row(out, row);
        }
    }
}

void write_percolation_csv(std::span<const PercolationReport> reports, std::ostream& out) {
    write_csv_row(out, {"p", "L", "median_fraction", "mean_fraction", "threshold"});
    for (const auto& rep : reports) {
        for (std::size_t b = 0; b < rep.box_sizes.size(); ++b) {
            write_csv_row(out, {format_double(rep.p), format_double(rep.box_sizes[b]),
                                format_double(rep.median_fraction[b]), format_double(stats::mean(rep.fractions[b])),
                                format_double(rep.threshold)});
        }
    }
}

std::string reached_set_svg(const PassageField& field, const ClusterMap& cmap, double phi, double t,
                            const ShapeError& err, const Box& region, double pitch) {
    const Geograph& g = field.graph();
    if (g.dim() != 2) throw UnsupportedDimensionError("SVG output is 2-d only");
    const Box& box = g.points().box();
    SvgCanvas svg(box.lower(0), box.lower(1), box.upper(0), box.upper(1));
    const ProbeGrid probes = ProbeGrid::over(region, pitch);
    const auto times = probe_times(field, cmap, probes);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        if (times[k] <= t) {
            const auto x = probes.probe(k);
            svg.rect(x[0] - pitch / 2, x[1] - pitch / 2, pitch, "#f4a261", 0.5);
        }
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const auto p = g.points().point(v);
        svg.circle(p[0], p[1], 1.0, g.in_giant(v) ? "#1d3557" : "#bbbbbb");
    }
    const double R = phi * t;
    svg.ring(region.center[0], region.center[1], R, "#2a9d8f", 1.5);
    svg.ring(region.center[0], region.center[1], (1.0 - err.eps) * R, "#e63946", 1.5, "6 4");
    svg.ring(region.center[0], region.center[1], (1.0 + err.eps) * R, "#e63946", 1.5, "6 4");
    return svg.str();
}

std::string graph_svg(const Geograph& g, std::optional<double> open_p, std::uint64_t weight_seed) {
    if (g.dim() != 2) throw UnsupportedDimensionError("SVG output is 2-d only");
    const Box& box = g.points().box();
    SvgCanvas svg(box.lower(0), box.lower(1), box.upper(0), box.upper(1));
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        const auto a = g.points().point(u);
        for (VertexId v : g.neighbors(u)) {
            if (v < u) continue;
            const auto b = g.points().point(v);
            const bool giant = g.in_giant(u);
            const bool open = giant && open_p && edge_uniform(weight_seed, u, v) < *open_p;
            svg.line(a[0], a[1], b[0], b[1], open ? "#e63946" : giant ? "#457b9d" : "#cccccc", open ? 1.2 : 0.6);
        }
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const auto p = g.points().point(v);
        svg.circle(p[0], p[1], 1.2, g.in_giant(v) ? "#1d3557" : "#999999");
    }
    return svg.str();
}

}  // namespace rggfpp
