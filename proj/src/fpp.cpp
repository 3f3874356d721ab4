#include "rggfpp/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>

#include <nlohmann/json.hpp>

#include "rggfpp/errors.hpp"
#include "rggfpp/io.hpp"
#include "rggfpp/rng.hpp"

namespace rggfpp {

PassageSpec PassageSpec::bernoulli(double p) {
    PassageSpec s;
    s.family = PassageFamily::bernoulli;
    s.p = p;
    s.validate();
    return s;
}

PassageSpec PassageSpec::exponential(double rate) {
    PassageSpec s;
    s.family = PassageFamily::exponential;
    s.rate = rate;
    s.validate();
    return s;
}

PassageSpec PassageSpec::constant(double c) {
    PassageSpec s;
    s.family = PassageFamily::constant;
    s.c = c;
    s.validate();
    return s;
}

PassageSpec PassageSpec::uniform(double a, double b) {
    PassageSpec s;
    s.family = PassageFamily::uniform;
    s.a = a;
    s.b = b;
    s.validate();
    return s;
}

double PassageSpec::quantile(double u) const {
    switch (family) {
        case PassageFamily::bernoulli: return u < p ? 0.0 : 1.0;
        case PassageFamily::exponential: return -std::log1p(-u) / rate;
        case PassageFamily::constant: return c;
        case PassageFamily::uniform: return a + (b - a) * u;
    }
    return 0.0;
}

double PassageSpec::mean() const {
    switch (family) {
        case PassageFamily::bernoulli: return 1.0 - p;
        case PassageFamily::exponential: return 1.0 / rate;
        case PassageFamily::constant: return c;
        case PassageFamily::uniform: return 0.5 * (a + b);
    }
    return 0.0;
}

double PassageSpec::zero_atom() const {
    switch (family) {
        case PassageFamily::bernoulli: return p;
        case PassageFamily::exponential: return 0.0;
        case PassageFamily::constant: return c == 0.0 ? 1.0 : 0.0;
        case PassageFamily::uniform: return a == b && a == 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

void PassageSpec::validate() const {
    switch (family) {
        case PassageFamily::bernoulli:
            if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("bernoulli p must lie in [0,1]");
            break;
        case PassageFamily::exponential:
            if (!(rate > 0.0) || !std::isfinite(rate)) throw ParameterError("exponential rate must be positive");
            break;
        case PassageFamily::constant:
            if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("constant must be non-negative");
            break;
        case PassageFamily::uniform:
            if (!(a >= 0.0 && a <= b) || !std::isfinite(b)) throw ParameterError("uniform needs 0 <= a <= b");
            break;
    }
}

std::string PassageSpec::family_name() const {
    switch (family) {
        case PassageFamily::bernoulli: return "bernoulli";
        case PassageFamily::exponential: return "exponential";
        case PassageFamily::constant: return "constant";
        case PassageFamily::uniform: return "uniform";
    }
    return "?";
}

void to_json(nlohmann::json& j, const PassageSpec& s) {
    j = {{"family", s.family_name()}};
    switch (s.family) {
        case PassageFamily::bernoulli: j["params"] = {{"p", s.p}}; break;
        case PassageFamily::exponential: j["params"] = {{"rate", s.rate}}; break;
        case PassageFamily::constant: j["params"] = {{"c", s.c}}; break;
        case PassageFamily::uniform: j["params"] = {{"a", s.a}, {"b", s.b}}; break;
    }
}

void from_json(const nlohmann::json& j, PassageSpec& s) {
    if (!j.is_object()) throw ParameterError("passage must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k != "family" && k != "params") throw ParameterError("unknown passage field: " + k);
    }
    const std::string fam = j.at("family").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    auto take = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : params.items()) {
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) ==
                allowed.end()) {
                throw ParameterError("unknown " + fam + " parameter: " + k);
            }
        }
    };
    if (fam == "bernoulli") {
        take({"p"});
        s = PassageSpec::bernoulli(params.at("p").get<double>());
    } else if (fam == "exponential") {
        take({"rate"});
        s = PassageSpec::exponential(params.value("rate", 1.0));
    } else if (fam == "constant") {
        take({"c"});
        s = PassageSpec::constant(params.value("c", 1.0));
    } else if (fam == "uniform") {
        take({"a", "b"});
        s = PassageSpec::uniform(params.at("a").get<double>(), params.at("b").get<double>());
    } else {
        throw ParameterError("unknown passage family: " + fam);
    }
}

EdgeWeights assign_passage_times(const Adjacency& adj, const PassageSpec& spec, std::uint64_t seed) {
    spec.validate();
    EdgeWeights w(adj.targets.size());
    for (VertexId u = 0; u < adj.vertex_count(); ++u) {
        for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
            w[k] = spec.quantile(edge_uniform(seed, u, adj.targets[k]));
        }
    }
    return w;
}

EdgeWeights assign_passage_times(const Geograph& g, const PassageSpec& spec, std::uint64_t seed) {
    return assign_passage_times(g.adjacency(), spec, seed);
}

std::vector<double> shortest_times(const Adjacency& adj, std::span<const double> weights, VertexId source,
                                   std::optional<VertexId> target) {
    const std::size_t n = adj.vertex_count();
    if (source >= n) throw ParameterError("invalid source vertex");
    if (weights.size() != adj.targets.size()) throw ParameterError("weights do not match the adjacency");
    std::vector<double> dist(n, kUnreached);
    std::vector<char> done(n, 0);
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [du, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (target && u == *target) break;
        for (std::size_t k = adj.offsets[u]; k < adj.offsets[u + 1]; ++k) {
            const double w = weights[k];
            if (w < 0.0 || std::isnan(w)) throw IntegrityError("negative or NaN edge weight");
            const VertexId v = adj.targets[k];
            const double nd = du + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

PassageField::PassageField(const Geograph& g, EdgeWeights weights, VertexId source, std::vector<double> times)
    : g_(&g), weights_(std::move(weights)), source_(source), times_(std::move(times)) {}

std::optional<double> PassageField::time(VertexId v) const {
    if (times_[v] == kUnreached) return std::nullopt;
    return times_[v];
}

PassageField first_passage(const Geograph& g, EdgeWeights weights, VertexId source) {
    auto times = shortest_times(g.adjacency(), weights, source);
    return PassageField(g, std::move(weights), source, std::move(times));
}

double passage_between(const Geograph& g, std::span<const double> weights, const ClusterMap& cmap,
                       std::span<const double> x, std::span<const double> y) {
    const VertexId qx = cmap.nearest(x);
    const VertexId qy = cmap.nearest(y);
    if (qx == qy) return 0.0;
    // Always start from the smaller id so the float sums are order-identical.
    const VertexId from = std::min(qx, qy);
    const VertexId to = std::max(qx, qy);
    const auto t = shortest_times(g.adjacency(), weights, from, to);
    return t[to];
}

GrowthSet ball_at_time(const PassageField& field, const ClusterMap& cmap, double t, const Box& region,
                       double pitch) {
    if (!(t >= 0.0)) throw ParameterError("t must be non-negative");
    GrowthSet out;
    const auto& times = field.raw_times();
    for (VertexId v = 0; v < times.size(); ++v) {
        if (times[v] <= t) out.vertices.push_back(v);
    }
    const ProbeGrid probes = ProbeGrid::over(region, pitch);
    out.probes = probes.size();
    for (std::size_t k = 0; k < probes.size(); ++k) {
        if (times[cmap.nearest(probes.probe(k))] <= t) ++out.probes_reached;
    }
    out.volume = static_cast<double>(out.probes_reached) * probes.cell_volume();
    return out;
}

GrowthTrace::GrowthTrace(int dim, std::vector<double> s, std::vector<double> z, std::vector<VertexId> ids,
                         std::size_t ties)
    : dim_(dim), s_(std::move(s)), z_(std::move(z)), ids_(std::move(ids)), ties_(ties) {}

GrowthTrace growth_trace(const PassageField& field) {
    const auto& times = field.raw_times();
    std::vector<VertexId> order;
    for (VertexId v = 0; v < times.size(); ++v) {
        if (times[v] != kUnreached) order.push_back(v);
    }
    std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return times[a] < times[b]; });
    const int d = field.graph().dim();
    std::vector<double> s, z;
    std::size_t ties = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        s.push_back(times[order[k]]);
        if (k > 0 && s[k] == s[k - 1]) ++ties;
        const auto p = field.graph().points().point(order[k]);
        z.insert(z.end(), p.begin(), p.end());
    }
    return GrowthTrace(d, std::move(s), std::move(z), std::move(order), ties);
}

A1Check check_A1(const PassageSpec& spec, double lambda, double r, int d) {
    spec.validate();
    A1Check c;
    c.atom = spec.zero_atom();
    c.threshold = 1.0 / (unit_ball_volume(d) * std::pow(r, d) * lambda);
    c.satisfied = c.atom < c.threshold;
    return c;
}

A2Check check_A2(const PassageSpec& spec, int d) {
    spec.validate();
    // Every supported family has all moments finite (bounded laws, and the
    // exponential has exponential moments).
    A2Check c;
    c.required = 2.0 * d + 2.0;
    c.moment_order = std::numeric_limits<double>::infinity();
    c.satisfied = c.moment_order > c.required;
    return c;
}

void write_passage_csv(const PassageField& field, std::ostream& out) {
    const int d = field.graph().dim();
    std::vector<std::string> row{"vertex_id"};
    for (int a = 0; a < d; ++a) row.push_back("x" + std::to_string(a));
    row.push_back("T");
    write_csv_row(out, row);
    const auto& times = field.raw_times();
    for (VertexId v = 0; v < times.size(); ++v) {
        row.clear();
        row.push_back(std::to_string(v));
        for (double x : field.graph().points().point(v)) row.push_back(format_double(x));
        row.push_back(times[v] == kUnreached ? "unreached" : format_double(times[v]));
        write_csv_row(out, row);
    }
}

void write_trace_csv(const GrowthTrace& trace, std::ostream& out) {
    std::vector<std::string> row{"k", "s_k", "psi_k"};
    for (int a = 0; a < trace.dim(); ++a) row.push_back("z" + std::to_string(a));
    write_csv_row(out, row);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        row.clear();
        row.push_back(std::to_string(k));
        row.push_back(format_double(trace.s(k)));
        row.push_back(k == 0 ? "" : format_double(trace.psi(k)));
        for (double x : trace.phi(k)) row.push_back(format_double(x));
        write_csv_row(out, row);
    }
}

}  // namespace rggfpp
