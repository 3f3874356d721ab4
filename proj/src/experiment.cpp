#include "rggfpp/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <set>
#include <sstream>

#include "rggfpp/errors.hpp"
#include "rggfpp/geograph.hpp"
#include "rggfpp/io.hpp"
#include "rggfpp/point_process.hpp"
#include "rggfpp/rng.hpp"
#include "rggfpp/scaling.hpp"
#include "rggfpp/shape.hpp"
#include "rggfpp/parallel.hpp"
#include "rggfpp/stats.hpp"

#ifndef RGGFPP_VERSION
#define RGGFPP_VERSION "0.0.0"
#endif

namespace rggfpp {

using nlohmann::json;

std::string artifact_version() { return RGGFPP_VERSION; }

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::ppp: return "ppp";
        case ExperimentKind::rgg: return "rgg";
        case ExperimentKind::fpp: return "fpp";
        case ExperimentKind::shape: return "shape";
        case ExperimentKind::perc: return "perc";
        case ExperimentKind::scale: return "scale";
    }
    return "?";
}

ExperimentKind parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::ppp, ExperimentKind::rgg, ExperimentKind::fpp, ExperimentKind::shape,
                   ExperimentKind::perc, ExperimentKind::scale}) {
        if (to_string(k) == s) return k;
    }
    throw ParameterError("unknown experiment kind: " + s);
}

namespace {

// Reads known keys and rejects the rest.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j.is_object()) throw ParameterError(where_ + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ParameterError(where_ + key + ": " + e.what());
        }
    }

    const json* sub(const char* key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw ParameterError("unknown field: " + where_ + k);
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
}

}  // namespace

void ExperimentConfig::validate() const {
    require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
    require(r > 0.0 && std::isfinite(r), "r must be positive");
    require(d >= 2 && d <= 8, "d must lie in [2, 8]");
    require(box > 0.0 && std::isfinite(box), "box half-width must be positive");
    require(lambda_I > 0.0, "lambda_I must be positive");
    require(replicas >= 1, "replicas must be >= 1");
    passage.validate();
    if (fpp.source) require(fpp.source->size() == static_cast<std::size_t>(d), "fpp.source has wrong dimension");
    for (double t : fpp.t_values) require(t >= 0.0, "fpp.t_values must be non-negative");
    require(shape.task == "profile" || shape.task == "error", "shape.task must be profile or error");
    require(shape.mode == "annealed" || shape.mode == "quenched", "shape.mode must be annealed or quenched");
    require(!shape.s_list.empty() && std::is_sorted(shape.s_list.begin(), shape.s_list.end()) &&
                shape.s_list.front() > 0.0,
            "shape.s_list must be positive and increasing");
    require(shape.seeds >= 1 && shape.directions >= 1, "shape needs seeds and directions");
    require(shape.margin >= 0.0 && shape.margin < 1.0, "shape.margin must lie in [0,1)");
    require(!shape.t_list.empty() && shape.t_list.front() > 0.0, "shape.t_list must be positive");
    require(shape.phi >= 0.0, "shape.phi must be non-negative");
    for (double p : perc.p_grid) require(p >= 0.0 && p <= 1.0, "perc.p_grid values must lie in [0,1]");
    require(!perc.p_grid.empty() && !perc.box_sizes.empty() && perc.seeds >= 1, "perc needs p_grid, box_sizes, seeds");
    for (double L : perc.box_sizes) require(L > 0.0, "perc.box_sizes must be positive");
    require(scale.task == "kernels" || scale.task == "converge" || scale.task == "reg",
            "scale.task must be kernels, converge or reg");
    require(!scale.alphas.empty() && std::is_sorted(scale.alphas.begin(), scale.alphas.end()) &&
                scale.alphas.front() > 0.0,
            "scale.alphas must be positive and increasing");
    require(scale.delta > 0.0 && scale.k >= 1 && scale.runs >= 2 && scale.mc_samples >= 2 && scale.ell > 0.0,
            "scale: invalid delta, k, runs, mc_samples or ell");
    for (const auto& x : scale.S) require(x.size() == static_cast<std::size_t>(d), "scale.S has wrong dimension");
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    Fields f(j, "");
    std::string kind = to_string(c.kind);
    f.get("kind", kind);
    c.kind = parse_kind(kind);
    f.get("lambda", c.lambda);
    f.get("r", c.r);
    f.get("d", c.d);
    f.get("box", c.box);
    f.get("lambda_I", c.lambda_I);
    if (const json* p = f.sub("passage")) {
        try {
            c.passage = p->get<PassageSpec>();
        } catch (const json::exception& e) {
            throw ParameterError(std::string("passage: ") + e.what());
        }
    }
    f.get("seed", c.seed);
    f.get("replicas", c.replicas);
    f.get("threads", c.threads);
    f.get("svg", c.svg);
    // fpp.source may also be given at top level, as in the fpp run config.
    if (const json* s = f.sub("source")) {
        if (!s->is_null()) c.fpp.source = s->get<Point>();
    }
    if (const json* s = f.sub("fpp")) {
        Fields g(*s, "fpp.");
        if (const json* src = g.sub("source")) {
            if (!src->is_null()) c.fpp.source = src->get<Point>();
        }
        g.get("t_values", c.fpp.t_values);
        g.get("probe_pitch", c.fpp.probe_pitch);
        g.finish();
    }
    if (const json* s = f.sub("shape")) {
        Fields g(*s, "shape.");
        g.get("task", c.shape.task);
        g.get("directions", c.shape.directions);
        g.get("s_list", c.shape.s_list);
        g.get("seeds", c.shape.seeds);
        g.get("mode", c.shape.mode);
        g.get("margin", c.shape.margin);
        g.get("bootstrap", c.shape.bootstrap);
        g.get("t_list", c.shape.t_list);
        g.get("phi", c.shape.phi);
        g.get("phi_seeds", c.shape.phi_seeds);
        g.get("probe_pitch", c.shape.probe_pitch);
        g.finish();
    }
    if (const json* s = f.sub("perc")) {
        Fields g(*s, "perc.");
        g.get("p_grid", c.perc.p_grid);
        g.get("box_sizes", c.perc.box_sizes);
        g.get("seeds", c.perc.seeds);
        g.finish();
    }
    if (const json* s = f.sub("scale")) {
        Fields g(*s, "scale.");
        g.get("task", c.scale.task);
        g.get("alphas", c.scale.alphas);
        g.get("delta", c.scale.delta);
        g.get("k", c.scale.k);
        g.get("runs", c.scale.runs);
        g.get("S", c.scale.S);
        g.get("mc_samples", c.scale.mc_samples);
        g.get("coupled", c.scale.coupled);
        g.get("ell", c.scale.ell);
        g.finish();
    }
    f.finish();
    c.validate();
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

json serialize_config(const ExperimentConfig& c) {
    json j;
    j["kind"] = to_string(c.kind);
    j["lambda"] = c.lambda;
    j["r"] = c.r;
    j["d"] = c.d;
    j["box"] = c.box;
    j["lambda_I"] = c.lambda_I;
    j["passage"] = c.passage;
    j["seed"] = c.seed;
    j["replicas"] = c.replicas;
    j["threads"] = c.threads;
    j["svg"] = c.svg;
    j["fpp"] = {{"source", c.fpp.source ? json(*c.fpp.source) : json(nullptr)},
                {"t_values", c.fpp.t_values},
                {"probe_pitch", c.fpp.probe_pitch}};
    j["shape"] = {{"task", c.shape.task},       {"directions", c.shape.directions},
                  {"s_list", c.shape.s_list},   {"seeds", c.shape.seeds},
                  {"mode", c.shape.mode},       {"margin", c.shape.margin},
                  {"bootstrap", c.shape.bootstrap}, {"t_list", c.shape.t_list},
                  {"phi", c.shape.phi},         {"phi_seeds", c.shape.phi_seeds},
                  {"probe_pitch", c.shape.probe_pitch}};
    j["perc"] = {{"p_grid", c.perc.p_grid}, {"box_sizes", c.perc.box_sizes}, {"seeds", c.perc.seeds}};
    j["scale"] = {{"task", c.scale.task},   {"alphas", c.scale.alphas},         {"delta", c.scale.delta},
                  {"k", c.scale.k},         {"runs", c.scale.runs},             {"S", c.scale.S},
                  {"mc_samples", c.scale.mc_samples}, {"coupled", c.scale.coupled}, {"ell", c.scale.ell}};
    return j;
}

json RunManifest::to_json() const {
    return {{"config", config},
            {"config_hash", config_hash},
            {"root_seed", root_seed},
            {"replica_seeds", replica_seeds},
            {"version", version},
            {"wall_clock_seconds", wall_clock_seconds},
            {"started_utc", started_utc},
            {"outputs", outputs},
            {"warnings", warnings},
            {"summary", summary}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    try {
        m.config = j.at("config");
        m.config_hash = j.value("config_hash", "");
        m.root_seed = j.value("root_seed", std::uint64_t{0});
        m.replica_seeds = j.value("replica_seeds", std::vector<std::uint64_t>{});
        m.version = j.value("version", "");
        m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
        m.started_utc = j.value("started_utc", "");
        m.outputs = j.value("outputs", std::map<std::string, std::string>{});
        m.warnings = j.value("warnings", std::vector<std::string>{});
        m.summary = j.value("summary", json::object());
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

OutputTarget OutputTarget::parse(const std::filesystem::path& out) {
    OutputTarget t;
    if (out.has_extension()) {
        t.dir = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");
        t.prefix = out.stem().string() + ".";
        t.primary = out.filename().string();
    } else {
        t.dir = out.empty() ? std::filesystem::path(".") : out;
    }
    return t;
}

std::filesystem::path OutputTarget::file(const std::string& name) const { return dir / (prefix + name); }

namespace {

class Run {
public:
    Run(const ExperimentConfig& cfg, const OutputTarget& out) : cfg_(cfg), out_(out) {}

    void emit(const std::string& name, const std::string& content, bool primary = false) {
        const std::string fname = primary && out_.primary ? *out_.primary : out_.prefix + name;
        write_file(out_.dir / fname, content);
        m.outputs[fname] = sha256_hex(content);
    }

    std::uint64_t replica_seed(std::size_t i) {
        const std::uint64_t s = derive_seed(cfg_.seed, to_string(cfg_.kind) + ".replica", i);
        m.replica_seeds.push_back(s);
        return s;
    }

    RunManifest m;

private:
    const ExperimentConfig& cfg_;
    const OutputTarget& out_;
};

template <class F>
std::string to_text(F&& f) {
    std::ostringstream ss;
    f(ss);
    return ss.str();
}

std::string fmt(double x) { return format_double(x); }

void run_ppp(const ExperimentConfig& c, Run& run) {
    for (std::size_t i = 0; i < c.replicas; ++i) {
        const auto ps = sample_ppp(c.lambda, Box::centered(c.d, c.box), run.replica_seed(i));
        const std::string name = c.replicas == 1 ? "points.ndjson" : "points_" + std::to_string(i) + ".ndjson";
        run.emit(name, to_ndjson(ps), i == 0);
        run.m.summary["count"].push_back(ps.size());
    }
}

void run_rgg(const ExperimentConfig& c, Run& run) {
    const auto g = build_rgg(sample_ppp(c.lambda, Box::centered(c.d, c.box), run.replica_seed(0)), c.r);
    for (const auto& w : g.warnings()) run.m.warnings.push_back(w);
    run.emit("graph.ndjson", to_text([&](std::ostream& o) { write_graph_ndjson(g, o); }), true);
    run.m.summary["vertices"] = g.vertex_count();
    run.m.summary["edges"] = g.edge_count();
    run.m.summary["giant_fraction"] = g.giant_fraction();
    if (g.components().giant_size() > 0) {
        const auto th = estimate_theta(g, 0.8);
        run.m.summary["theta_vertex_density"] = th.vertex_density;
        run.m.summary["theta_ball_hit_frequency"] = th.ball_hit_frequency;
    }
    if (c.svg) run.emit("graph.svg", graph_svg(g));
}

void run_fpp(const ExperimentConfig& c, Run& run) {
    const auto a1 = check_A1(c.passage, c.lambda, c.r, c.d);
    const auto a2 = check_A2(c.passage, c.d);
    if (!a1.satisfied) run.m.warnings.push_back("A1 violated: P(tau=0)=" + fmt(a1.atom) + " >= " + fmt(a1.threshold));
    if (!a2.satisfied) run.m.warnings.push_back("A2 violated");
    const auto g = build_rgg(sample_ppp(c.lambda, Box::centered(c.d, c.box), run.replica_seed(0)), c.r);
    for (const auto& w : g.warnings()) run.m.warnings.push_back(w);
    const ClusterMap cmap(g);
    const Point src = c.fpp.source ? *c.fpp.source : Point(c.d, 0.0);
    const VertexId q = cmap.nearest(src);
    auto field = first_passage(g, assign_passage_times(g, c.passage, derive_seed(c.seed, "fpp.weights", 0)), q);
    run.emit("passage.csv", to_text([&](std::ostream& o) { write_passage_csv(field, o); }), true);
    const auto trace = growth_trace(field);
    run.emit("trace.csv", to_text([&](std::ostream& o) { write_trace_csv(trace, o); }));
    if (!c.fpp.t_values.empty()) {
        const double pitch = c.fpp.probe_pitch > 0.0 ? c.fpp.probe_pitch : c.r / 4.0;
        const Box region = g.points().box().shrunk(0.9);
        run.emit("growth.csv", to_text([&](std::ostream& o) {
                     write_csv_row(o, {"t", "vertices", "probes_reached", "volume"});
                     for (double t : c.fpp.t_values) {
                         const auto h = ball_at_time(field, cmap, t, region, pitch);
                         write_csv_row(o, {fmt(t), std::to_string(h.vertices.size()),
                                           std::to_string(h.probes_reached), fmt(h.volume)});
                     }
                 }));
    }
    run.m.summary["source_vertex"] = q;
    run.m.summary["tie_count"] = trace.tie_count();
    run.m.summary["A1"] = {{"satisfied", a1.satisfied}, {"atom", a1.atom}, {"threshold", a1.threshold}};
    run.m.summary["A2"] = {{"satisfied", a2.satisfied}, {"required", a2.required}};
    if (c.svg) run.emit("graph.svg", graph_svg(g));
}

ShapeConfig shape_config(const ExperimentConfig& c, std::uint64_t seed) {
    ShapeConfig s;
    s.lambda = c.lambda;
    s.r = c.r;
    s.d = c.d;
    s.passage = c.passage;
    s.margin = c.shape.margin;
    s.mode = c.shape.mode == "quenched" ? ShapeMode::quenched : ShapeMode::annealed;
    s.seed = seed;
    s.threads = c.threads;
    return s;
}

void run_shape_profile(const ExperimentConfig& c, Run& run) {
    const auto dirs = default_directions(c.d, c.shape.directions);
    const auto prof = directional_constants(shape_config(c, run.replica_seed(0)), dirs, c.shape.s_list, c.shape.seeds);
    for (const auto& w : prof.warnings) run.m.warnings.push_back(w);
    const double boot = bootstrap_spread_fraction(prof, 0, prof.s_list.size() - 1, c.shape.bootstrap,
                                                  derive_seed(c.seed, "shape.bootstrap", 0));
    run.emit("profile.csv", to_text([&](std::ostream& o) { write_profile_csv(prof, o); }), true);
    run.emit("shape_summary.csv", to_text([&](std::ostream& o) {
                 write_csv_row(o, {"statistic", "value"});
                 write_csv_row(o, {"isotropy", fmt(prof.isotropy)});
                 write_csv_row(o, {"phi", fmt(prof.phi)});
                 write_csv_row(o, {"spread_first_s", fmt(prof.spread(0))});
                 write_csv_row(o, {"spread_last_s", fmt(prof.spread(prof.s_list.size() - 1))});
                 write_csv_row(o, {"bootstrap_spread_fraction", fmt(boot)});
                 write_csv_row(o, {"subcritical", std::to_string(prof.subcritical)});
             }));
    run.m.summary["isotropy"] = prof.isotropy;
    run.m.summary["phi"] = prof.phi;
    run.m.summary["bootstrap_spread_fraction"] = boot;
}

}  // namespace

namespace {

void run_shape_error(const ExperimentConfig& c, Run& run) {
    double phi = c.shape.phi;
    if (phi <= 0.0) {
        const auto dirs = default_directions(c.d, c.shape.directions);
        const double s_phi[1] = {c.shape.s_list.back()};
        phi = directional_constants(shape_config(c, derive_seed(c.seed, "shape.phi", 0)), dirs, s_phi,
                                    c.shape.phi_seeds)
                  .phi;
    }
    std::vector<double> ts = c.shape.t_list;
    std::sort(ts.begin(), ts.end());
    const double pitch = c.shape.probe_pitch > 0.0 ? c.shape.probe_pitch : c.r / 4.0;
    const double L = (1.3 * phi * ts.back() + 2.0 * c.r) / (1.0 - c.shape.margin);
    const std::size_t n = c.shape.seeds;
    std::vector<std::vector<ShapeError>> errs(n);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < n; ++i) seeds.push_back(run.replica_seed(i));
    std::string svg;
    parallel_for(n, c.threads, [&](std::size_t i) {
        const auto g = build_rgg(sample_ppp(c.lambda, Box::centered(c.d, L), seeds[i]), c.r);
        const ClusterMap cmap(g);
        const Point o(c.d, 0.0);
        const auto field =
            first_passage(g, assign_passage_times(g, c.passage, derive_seed(seeds[i], "weights", 0)), cmap.nearest(o));
        const Box region = g.points().box().shrunk(1.0 - c.shape.margin);
        const ProbeGrid probes = ProbeGrid::over(region, pitch);
        const auto times = probe_times(field, cmap, probes);
        for (double t : ts) errs[i].push_back(shape_error_from_times(probes, times, o, phi, t, region));
        if (i == 0 && c.svg && c.d == 2) {
            svg = reached_set_svg(field, cmap, phi, ts.back(), errs[i].back(), region, pitch);
        }
    });
    std::size_t shrink = 0;
    run.emit("shape_error.csv", to_text([&](std::ostream& o) {
                 write_csv_row(o, {"replica", "t", "eps", "eps_in", "eps_out", "truncated"});
                 for (std::size_t i = 0; i < n; ++i) {
                     for (std::size_t j = 0; j < ts.size(); ++j) {
                         const auto& e = errs[i][j];
                         write_csv_row(o, {std::to_string(i), fmt(ts[j]), fmt(e.eps), fmt(e.eps_in), fmt(e.eps_out),
                                           e.truncated ? "1" : "0"});
                     }
                     if (errs[i].back().eps < errs[i].front().eps) ++shrink;
                 }
             }),
             true);
    if (!svg.empty()) run.emit("reached.svg", svg);
    run.m.summary["phi"] = phi;
    run.m.summary["shrink_fraction"] = static_cast<double>(shrink) / static_cast<double>(n);
}

void run_perc(const ExperimentConfig& c, Run& run) {
    PercolationConfig pc{c.lambda, c.r, c.d, run.replica_seed(0), c.threads};
    const auto reports = percolation_sweep(pc, c.perc.p_grid, c.perc.box_sizes, c.perc.seeds);
    run.emit("perc.csv", to_text([&](std::ostream& o) { write_percolation_csv(reports, o); }), true);
    run.m.summary["threshold"] = pc_lower_bound(c.lambda, c.r, c.d);
    if (c.svg) {
        const auto g = build_rgg(
            sample_ppp(c.lambda, Box::centered(c.d, c.perc.box_sizes.front()), derive_seed(pc.seed, "perc.points", 0)),
            c.r);
        run.emit("perc.svg", graph_svg(g, c.perc.p_grid.back(), derive_seed(pc.seed, "perc.weights", 0)));
    }
}

std::vector<Point> sources_or_origin(const ExperimentConfig& c) {
    return c.scale.S.empty() ? std::vector<Point>{Point(c.d, 0.0)} : c.scale.S;
}

// PPP of intensity alpha*lambda on a box holding every B_r(x), x in S,
// with S inserted.
PointSet kernel_sample(const ExperimentConfig& c, double alpha, std::span<const Point> S, std::uint64_t seed) {
    double reach = 0.0;
    for (const auto& x : S) {
        for (double v : x) reach = std::max(reach, std::abs(v));
    }
    PointSet ps = sample_ppp(alpha * c.lambda, Box::centered(c.d, reach + 1.5 * c.r), seed);
    for (const auto& x : S) {
        if (find_point(ps, x) < 0) ps = insert_point(ps, x);
    }
    return ps;
}

void run_scale(const ExperimentConfig& c, Run& run) {
    ScalingParams p;
    p.lambda = c.lambda;
    p.lambda_I = c.lambda_I;
    p.r = c.r;
    p.d = c.d;
    p.k = c.scale.k;
    if (c.scale.task == "kernels") {
        const auto S = sources_or_origin(c);
        const auto limit = limit_spatial_kernel(S, c.r, c.scale.delta, c.scale.mc_samples, c.lambda, c.lambda_I,
                                                derive_seed(c.seed, "scale.limit", 0));
        std::vector<std::uint64_t> seeds;
        for (std::size_t i = 0; i < c.replicas; ++i) seeds.push_back(run.replica_seed(i));
        std::string tv_csv = to_text([](std::ostream& o) { write_csv_row(o, {"alpha", "replica", "N", "rate", "tv"}); });
        json medians = json::object();
        for (std::size_t ai = 0; ai < c.scale.alphas.size(); ++ai) {
            const double alpha = c.scale.alphas[ai];
            std::vector<double> tv(c.replicas);
            std::vector<KernelEstimate> ks(c.replicas);
            parallel_for(c.replicas, c.threads, [&](std::size_t i) {
                const auto ps = kernel_sample(c, alpha, S, derive_seed(seeds[i], "alpha", ai));
                ks[i] = empirical_spatial_kernel(ps, S, c.r, c.scale.delta, alpha, c.lambda_I);
                tv[i] = cube_tv_distance(ks[i], limit);
            });
            for (std::size_t i = 0; i < c.replicas; ++i) {
                const double N = ks[i].rate * alpha / c.lambda_I;
                tv_csv += to_text([&](std::ostream& o) {
                    write_csv_row(o, {fmt(alpha), std::to_string(i), fmt(std::round(N)), fmt(ks[i].rate), fmt(tv[i])});
                });
            }
            if (ai == 0) run.emit("kernel_empirical.csv", to_text([&](std::ostream& o) { write_kernel_csv(ks[0], o); }), true);
            medians[fmt(alpha)] = stats::median(tv);
        }
        run.emit("kernel_limit.csv", to_text([&](std::ostream& o) { write_kernel_csv(limit, o); }));
        run.emit("kernel_tv.csv", tv_csv);
        run.m.summary["median_tv"] = medians;
    } else if (c.scale.task == "converge") {
        ConvergenceConfig cc;
        cc.alphas = c.scale.alphas;
        cc.params = p;
        cc.runs = c.scale.runs;
        cc.seed = run.replica_seed(0);
        cc.threads = c.threads;
        cc.coupled = c.scale.coupled;
        const auto rows = convergence_experiment(cc);
        run.emit("conv.csv", to_text([&](std::ostream& o) { write_convergence_csv(rows, o); }), true);
    } else {
        std::vector<std::uint64_t> seeds;
        for (std::size_t i = 0; i < c.replicas; ++i) seeds.push_back(run.replica_seed(i));
        std::string csv = to_text([](std::ostream& o) { write_csv_row(o, {"alpha", "replica", "holds", "worst"}); });
        json freq = json::object();
        const double half = c.scale.ell + c.scale.delta;
        for (std::size_t ai = 0; ai < c.scale.alphas.size(); ++ai) {
            const double alpha = c.scale.alphas[ai];
            std::vector<RegCheck> res(c.replicas);
            parallel_for(c.replicas, c.threads, [&](std::size_t i) {
                res[i] = reg_check(sample_ppp(alpha * c.lambda, Box::centered(c.d, half),
                                              derive_seed(seeds[i], "alpha", ai)),
                                   c.scale.ell, c.scale.delta);
            });
            std::size_t holds = 0;
            for (std::size_t i = 0; i < c.replicas; ++i) {
                holds += res[i].holds;
                csv += to_text([&](std::ostream& o) {
                    write_csv_row(o, {fmt(alpha), std::to_string(i), res[i].holds ? "1" : "0", fmt(res[i].worst)});
                });
            }
            freq[fmt(alpha)] = static_cast<double>(holds) / static_cast<double>(c.replicas);
        }
        run.emit("reg.csv", csv, true);
        run.m.summary["holds_frequency"] = freq;
    }
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const OutputTarget& out) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    Run run(cfg, out);
    run.m.config = serialize_config(cfg);
    run.m.config_hash = sha256_hex(run.m.config.dump());
    run.m.root_seed = cfg.seed;
    run.m.version = artifact_version();
    run.m.started_utc = utc_now();
    if (cfg.svg && cfg.d != 2) throw UnsupportedDimensionError("SVG output is 2-d only");
    switch (cfg.kind) {
        case ExperimentKind::ppp: run_ppp(cfg, run); break;
        case ExperimentKind::rgg: run_rgg(cfg, run); break;
        case ExperimentKind::fpp: run_fpp(cfg, run); break;
        case ExperimentKind::shape:
            if (cfg.shape.task == "profile") {
                run_shape_profile(cfg, run);
            } else {
                run_shape_error(cfg, run);
            }
            break;
        case ExperimentKind::perc: run_perc(cfg, run); break;
        case ExperimentKind::scale: run_scale(cfg, run); break;
    }
    run.m.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(out.file("manifest.json"), run.m.to_json().dump(2) + "\n");
    return run.m;
}

std::vector<std::string> verify_manifest(const RunManifest& m, const OutputTarget& out) {
    const ExperimentConfig cfg = parse_config(m.config);
    if (!m.config_hash.empty() && sha256_hex(serialize_config(cfg).dump()) != m.config_hash) {
        throw IntegrityError("manifest config hash does not match its config");
    }
    const RunManifest again = run_experiment(cfg, out);
    std::vector<std::string> bad;
    for (const auto& [name, digest] : m.outputs) {
        auto it = again.outputs.find(name);
        if (it == again.outputs.end() || it->second != digest) bad.push_back(name);
    }
    return bad;
}

}  // namespace rggfpp
