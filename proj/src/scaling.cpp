#include "rggfpp/scaling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>

#include "rggfpp/cell_grid.hpp"
#include "rggfpp/errors.hpp"
#include "rggfpp/io.hpp"
#include "rggfpp/parallel.hpp"
#include "rggfpp/rng.hpp"
#include "rggfpp/stats.hpp"
#include "rggfpp/union_find.hpp"

namespace rggfpp {

CubeIndex cube_index(std::span<const double> y, double delta) {
    CubeIndex z(y.size());
    for (std::size_t a = 0; a < y.size(); ++a) z[a] = static_cast<std::int64_t>(std::floor(y[a] / delta + 0.5));
    return z;
}

std::vector<std::size_t> find_sources(const PointSet& ps, std::span<const Point> S) {
    std::vector<std::size_t> idx;
    for (const auto& x : S) {
        if (x.size() != static_cast<std::size_t>(ps.dim())) throw ParameterError("source has wrong dimension");
        const auto i = find_point(ps, x);
        if (i < 0) throw ParameterError("source point is not in the sample");
        if (std::find(idx.begin(), idx.end(), static_cast<std::size_t>(i)) != idx.end()) {
            throw ParameterError("duplicate source point");
        }
        idx.push_back(static_cast<std::size_t>(i));
    }
    return idx;
}

namespace {
std::vector<char> membership(std::size_t n, std::span<const std::size_t> idx) {
    std::vector<char> in(n, 0);
    for (auto i : idx) in[i] = 1;
    return in;
}
}  // namespace

std::size_t n_alpha(const PointSet& ps, std::span<const Point> S, double r) {
    const auto idx = find_sources(ps, S);
    const auto in = membership(ps.size(), idx);
    const double r2 = r * r;
    std::size_t total = 0;
    for (auto x : idx) {
        for (std::size_t y = 0; y < ps.size(); ++y) {
            if (!in[y] && squared_distance(ps.point(x), ps.point(y)) <= r2) ++total;
        }
    }
    return total;
}

std::size_t n_alpha_dual(const PointSet& ps, std::span<const Point> S, double r) {
    const auto idx = find_sources(ps, S);
    const auto in = membership(ps.size(), idx);
    const double r2 = r * r;
    std::size_t total = 0;
    for (std::size_t y = 0; y < ps.size(); ++y) {
        if (in[y]) continue;
        for (auto x : idx) {
            if (squared_distance(ps.point(x), ps.point(y)) <= r2) ++total;
        }
    }
    return total;
}

double KernelEstimate::total_mass() const {
    double s = 0.0;
    for (const auto& [z, m] : masses) s += m.mass;
    return s;
}

KernelEstimate empirical_spatial_kernel(const PointSet& ps, std::span<const Point> S, double r, double delta,
                                        double alpha, double lambda_I) {
    if (!(delta > 0.0) || !(r > 0.0) || !(alpha > 0.0) || !(lambda_I > 0.0)) {
        throw ParameterError("kernel: r, delta, alpha, lambda_I must be positive");
    }
    const auto idx = find_sources(ps, S);
    const auto in = membership(ps.size(), idx);
    const double r2 = r * r;
    std::map<CubeIndex, std::size_t> counts;
    std::size_t N = 0;
    for (std::size_t y = 0; y < ps.size(); ++y) {
        if (in[y]) continue;
        std::size_t c = 0;
        for (auto x : idx) c += squared_distance(ps.point(x), ps.point(y)) <= r2;
        if (c == 0) continue;
        counts[cube_index(ps.point(y), delta)] += c;
        N += c;
    }
    if (N == 0) throw NoNeighborError("N_alpha(S) = 0: the empirical kernel is undefined");
    KernelEstimate k;
    k.dim = ps.dim();
    k.delta = delta;
    k.alpha = alpha;
    k.provenance = "empirical";
    k.sources.assign(S.begin(), S.end());
    k.rate = static_cast<double>(N) * lambda_I / alpha;
    for (const auto& [z, c] : counts) k.masses[z] = {static_cast<double>(c) / static_cast<double>(N), 0.0};
    return k;
}

KernelEstimate limit_spatial_kernel(std::span<const Point> S, double r, double delta, std::size_t mc_samples,
                                    double lambda, double lambda_I, std::uint64_t seed) {
    if (S.empty()) throw ParameterError("limit kernel: S must be non-empty");
    if (!(delta > 0.0) || !(r > 0.0) || !(lambda > 0.0) || !(lambda_I > 0.0) || mc_samples < 2) {
        throw ParameterError("limit kernel: invalid parameters");
    }
    const int d = static_cast<int>(S.front().size());
    const double ball = unit_ball_volume(d) * std::pow(r, d);
    const double cube_vol = std::pow(delta, d);
    const auto g = static_cast<std::int64_t>(
        std::max(1.0, std::floor(std::pow(static_cast<double>(mc_samples) / 2.0, 1.0 / d))));
    const double strata = std::pow(static_cast<double>(g), d);

    KernelEstimate k;
    k.dim = d;
    k.delta = delta;
    k.provenance = "limit";
    k.sources.assign(S.begin(), S.end());
    k.rate = static_cast<double>(S.size()) * ball * lambda * lambda_I;
    std::map<CubeIndex, double> var;
    const double r2 = r * r;

    for (std::size_t si = 0; si < S.size(); ++si) {
        const Point& x = S[si];
        if (x.size() != static_cast<std::size_t>(d)) throw ParameterError("limit kernel: mixed dimensions");
        Rng rng(derive_seed(seed, "limit.mc", si));
        CubeIndex lo(d), hi(d), z(d);
        for (int a = 0; a < d; ++a) {
            lo[a] = static_cast<std::int64_t>(std::floor((x[a] - r) / delta + 0.5));
            hi[a] = static_cast<std::int64_t>(std::floor((x[a] + r) / delta + 0.5));
            z[a] = lo[a];
        }
        double interior = 0.0;
        std::map<CubeIndex, std::pair<double, double>> boundary;  // volume, variance
        double boundary_total = 0.0;
        std::vector<std::int64_t> st(d);
        Point y(d);
        while (true) {
            double near2 = 0.0, far2 = 0.0;
            for (int a = 0; a < d; ++a) {
                const double c0 = delta * (static_cast<double>(z[a]) - 0.5);
                const double c1 = c0 + delta;
                const double nearest = std::clamp(x[a], c0, c1) - x[a];
                const double farthest = std::max(std::abs(c0 - x[a]), std::abs(c1 - x[a]));
                near2 += nearest * nearest;
                far2 += farthest * farthest;
            }
            if (far2 <= r2) {
                interior += cube_vol;
                k.masses[z].mass += cube_vol;
            } else if (near2 < r2) {
                // g^d strata, two draws each.
                double hits = 0.0, v = 0.0;
                std::fill(st.begin(), st.end(), 0);
                while (true) {
                    double f[2];
                    for (double& fi : f) {
                        for (int a = 0; a < d; ++a) {
                            const double t = (static_cast<double>(st[a]) + rng.uniform()) / static_cast<double>(g);
                            y[a] = delta * (static_cast<double>(z[a]) - 0.5 + t);
                        }
                        fi = squared_distance(y, x) < r2 ? 1.0 : 0.0;
                    }
                    hits += f[0] + f[1];
                    v += (f[0] - f[1]) * (f[0] - f[1]) / 4.0;
                    int a = 0;
                    while (a < d && st[a] == g - 1) st[a++] = 0;
                    if (a == d) break;
                    ++st[a];
                }
                const double vol = cube_vol * hits / (2.0 * strata);
                const double vol_var = cube_vol * cube_vol * v / (strata * strata);
                boundary[z] = {vol, vol_var};
                boundary_total += vol;
            }
            int a = 0;
            while (a < d && z[a] == hi[a]) {
                z[a] = lo[a];
                ++a;
            }
            if (a == d) break;
            ++z[a];
        }
        // Rescale the boundary estimates so that this ball carries its exact volume.
        const double scale = boundary_total > 0.0 ? (ball - interior) / boundary_total : 0.0;
        for (const auto& [bz, vv] : boundary) {
            k.masses[bz].mass += vv.first * scale;
            var[bz] += vv.second * scale * scale;
        }
    }
    const double norm_ = static_cast<double>(S.size()) * ball;
    for (auto& [z, m] : k.masses) {
        m.mass /= norm_;
        m.se = std::sqrt(var[z]) / norm_;
    }
    return k;
}

double cube_tv_distance(const KernelEstimate& k1, const KernelEstimate& k2) {
    if (k1.delta != k2.delta) throw ParameterError("cube_tv_distance: delta mismatch");
    double s = 0.0;
    auto a = k1.masses.begin(), b = k2.masses.begin();
    while (a != k1.masses.end() || b != k2.masses.end()) {
        if (b == k2.masses.end() || (a != k1.masses.end() && a->first < b->first)) {
            s += std::abs(a->second.mass);
            ++a;
        } else if (a == k1.masses.end() || b->first < a->first) {
            s += std::abs(b->second.mass);
            ++b;
        } else {
            s += std::abs(a->second.mass - b->second.mass);
            ++a;
            ++b;
        }
    }
    return s;
}

RegCheck reg_check(const PointSet& ps, double ell, double delta) {
    if (!(ell > 0.0) || !(delta > 0.0)) throw ParameterError("reg_check: ell and delta must be positive");
    const int d = ps.dim();
    const Point origin(d, 0.0);
    if (ps.box().distance_to_boundary(origin) < ell) throw ParameterError("reg_check: B_ell(o) must lie in the box");
    const auto M = static_cast<std::int64_t>(std::ceil(ell / delta)) + 1;
    std::map<CubeIndex, std::size_t> counts;
    CubeIndex z(d, -M);
    while (true) {
        double far2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double c = delta * (std::abs(static_cast<double>(z[a])) + 0.5);
            far2 += c * c;
        }
        if (far2 < ell * ell) counts[z] = 0;
        int a = 0;
        while (a < d && z[a] == M) z[a++] = -M;
        if (a == d) break;
        ++z[a];
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto it = counts.find(cube_index(ps.point(i), delta));
        if (it != counts.end()) ++it->second;
    }
    const double expected = ps.intensity() * std::pow(delta, d);
    RegCheck out;
    out.cubes = counts.size();
    for (const auto& [cz, c] : counts) {
        const double dev = std::abs(static_cast<double>(c) / expected - 1.0);
        out.worst = std::max(out.worst, dev);
    }
    out.holds = out.worst < delta;
    return out;
}

void ScalingParams::validate() const {
    if (!(lambda > 0.0) || !(lambda_I > 0.0) || !(r > 0.0)) throw ParameterError("scale: lambda, lambda_I, r > 0");
    if (d < 2) throw ParameterError("scale: d >= 2");
    if (k < 1) throw ParameterError("scale: k >= 1");
}

WindowComponents window_components(const PointSet& ps, double r) {
    const int d = ps.dim();
    // Cells of diameter below r are cliques, so components can be merged
    // cell by cell.
    const double side = r / std::sqrt(static_cast<double>(d)) * (1.0 - 1e-12);
    const CellGrid grid(ps, side);
    const auto& dims = grid.shape();
    const auto reach = static_cast<std::int64_t>(std::ceil(r / side));
    UnionFind uf(grid.cell_count());
    const double r2 = r * r;
    std::vector<std::int64_t> a(d), b(d), off(d);
    for (std::size_t ca = 0; ca < grid.cell_count(); ++ca) {
        if (grid.cell_items(ca).empty()) continue;
        std::size_t rest = ca;
        for (int t = 0; t < d; ++t) {
            a[t] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(dims[t]));
            rest /= static_cast<std::size_t>(dims[t]);
        }
        std::fill(off.begin(), off.end(), -reach);
        while (true) {
            bool ok = true;
            for (int t = 0; t < d; ++t) {
                b[t] = a[t] + off[t];
                ok &= b[t] >= 0 && b[t] < dims[t];
            }
            if (ok) {
                const std::size_t cb = grid.linear(b);
                if (cb > ca && !grid.cell_items(cb).empty() && uf.find(static_cast<std::uint32_t>(ca)) !=
                                                                   uf.find(static_cast<std::uint32_t>(cb))) {
                    bool linked = false;
                    for (std::uint32_t i : grid.cell_items(ca)) {
                        const auto p = ps.point(i);
                        double box2 = 0.0;
                        for (int t = 0; t < d; ++t) {
                            const double lo = ps.box().lower(t) + static_cast<double>(b[t]) * side;
                            const double gap = std::max({lo - p[t], p[t] - (lo + side), 0.0});
                            box2 += gap * gap;
                        }
                        if (box2 >= r2) continue;
                        for (std::uint32_t j : grid.cell_items(cb)) {
                            if (squared_distance(p, ps.point(j)) < r2) {
                                linked = true;
                                break;
                            }
                        }
                        if (linked) break;
                    }
                    if (linked) uf.unite(static_cast<std::uint32_t>(ca), static_cast<std::uint32_t>(cb));
                }
            }
            int t = 0;
            while (t < d && off[t] == reach) off[t++] = -reach;
            if (t == d) break;
            ++off[t];
        }
    }
    WindowComponents out;
    out.labels.resize(ps.size());
    std::vector<std::size_t> size(grid.cell_count(), 0);
    std::vector<std::uint32_t> first(grid.cell_count(), UINT32_MAX);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const std::uint32_t root = uf.find(static_cast<std::uint32_t>(c));
        for (std::uint32_t i : grid.cell_items(c)) {
            out.labels[i] = root;
            ++size[root];
            first[root] = std::min(first[root], i);
        }
    }
    for (std::uint32_t c = 0; c < size.size(); ++c) {
        if (size[c] > out.giant_size || (size[c] == out.giant_size && size[c] > 0 && first[c] < first[out.giant])) {
            out.giant = c;
            out.giant_size = size[c];
        }
    }
    return out;
}

namespace {

std::uint64_t alpha_tag(double alpha) { return std::bit_cast<std::uint64_t>(alpha); }

struct Window {
    PointSet ps;
    std::uint32_t q = 0;
    bool ok = false;
    double giant_fraction = 0.0;
};

Window sample_window(double alpha, const ScalingParams& p, std::uint64_t seed) {
    Window w{sample_ppp(alpha * p.lambda, Box::centered(p.d, p.window()),
                        derive_seed(seed, "scale.points", alpha_tag(alpha)))};
    if (w.ps.empty()) return w;
    const auto comps = window_components(w.ps, p.r);
    w.giant_fraction = static_cast<double>(comps.giant_size) / static_cast<double>(w.ps.size());
    if (w.giant_fraction < p.min_giant_fraction) return w;
    const Point origin(p.d, 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < w.ps.size(); ++i) {
        if (comps.labels[i] != comps.giant) continue;
        const double d2 = squared_distance(w.ps.point(i), origin);
        if (d2 < best || (d2 == best && lex_less(w.ps.point(i), w.ps.point(w.q)))) {
            best = d2;
            w.q = i;
        }
    }
    w.ok = true;
    return w;
}

RescaledRun direct_run(double alpha, const ScalingParams& p, std::uint64_t seed) {
    RescaledRun run;
    run.alpha = alpha;
    run.seed = seed;
    Window w = sample_window(alpha, p, seed);
    run.giant_fraction = w.giant_fraction;
    if (!w.ok) {
        run.subcritical = true;
        return run;
    }
    const PointSet& ps = w.ps;
    const CellGrid grid(ps, p.r);
    const std::uint64_t wseed = derive_seed(seed, "scale.weights", alpha_tag(alpha));
    const PassageSpec law = PassageSpec::exponential(p.lambda_I / alpha);
    const double r2 = p.r * p.r;
    std::vector<double> dist(ps.size(), kUnreached);
    std::vector<char> done(ps.size(), 0);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[w.q] = 0.0;
    heap.emplace(0.0, w.q);
    double last = 0.0;
    while (!heap.empty() && run.Z.size() < static_cast<std::size_t>(p.k) + 1) {
        const auto [du, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        const auto pu = ps.point(u);
        run.Z.emplace_back(pu.begin(), pu.end());
        if (run.Z.size() > 1) run.T.push_back(du - last);
        last = du;
        grid.for_each_near(pu, 1, [&](std::uint32_t v) {
            if (v == u || done[v] || squared_distance(pu, ps.point(v)) >= r2) return;
            const double nd = du + law.quantile(edge_uniform(wseed, u, v));
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        });
    }
    run.complete = run.Z.size() == static_cast<std::size_t>(p.k) + 1;
    return run;
}

struct Draws {
    double E, u0, u;
    Point jitter;
};

Draws next_draws(Rng& rng, int d) {
    Draws dr;
    dr.E = rng.standard_exponential();
    dr.u0 = rng.uniform();
    dr.u = rng.uniform();
    dr.jitter.resize(d);
    for (double& x : dr.jitter) x = rng.uniform();
    return dr;
}

struct Leaf {
    std::uint32_t item;
    Point lo, hi;
};

// Equal-count nested partition of the unit cube keyed on candidate cube
// coordinates; each leaf gets volume 1/n.
void partition(std::span<std::uint32_t> members, const std::vector<Point>& c, int axis, Point lo, Point hi,
               std::vector<Leaf>& out) {
    const int d = static_cast<int>(lo.size());
    const std::size_t n = members.size();
    if (n == 1 || axis == d) {
        out.push_back({members[0], std::move(lo), std::move(hi)});
        return;
    }
    const std::size_t m =
        axis == d - 1 ? n
                      : std::max<std::size_t>(
                            1, static_cast<std::size_t>(std::lround(std::pow(static_cast<double>(n),
                                                                             1.0 / (d - axis + 2)))));
    std::stable_sort(members.begin(), members.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return c[a][axis] < c[b][axis]; });
    const double w = hi[axis] - lo[axis];
    const double base = lo[axis];
    for (std::size_t g = 0; g < m; ++g) {
        const std::size_t b0 = g * n / m, b1 = (g + 1) * n / m;
        Point l = lo, h = hi;
        l[axis] = base + w * static_cast<double>(b0) / static_cast<double>(n);
        h[axis] = base + w * static_cast<double>(b1) / static_cast<double>(n);
        partition(members.subspan(b0, b1 - b0), c, axis + 1, std::move(l), std::move(h), out);
    }
}

Point limit_child(std::span<const double> parent, std::span<const double> cube, double r) {
    Point y = cube_to_ball(cube, r);
    for (std::size_t a = 0; a < y.size(); ++a) y[a] += parent[a];
    return y;
}

Point cell_point(const Leaf& leaf, std::span<const double> jitter) {
    Point x(jitter.size());
    for (std::size_t a = 0; a < x.size(); ++a) x[a] = leaf.lo[a] + (leaf.hi[a] - leaf.lo[a]) * jitter[a];
    return x;
}

// Kernel chain on the sample; with `limit` set, also advances the coupled
// limit chain on the same draws.
RescaledRun chain_run(double alpha, const ScalingParams& p, std::uint64_t seed, RescaledRun* limit) {
    RescaledRun run;
    run.alpha = alpha;
    run.seed = seed;
    Window w = sample_window(alpha, p, seed);
    run.giant_fraction = w.giant_fraction;
    if (!w.ok) {
        run.subcritical = true;
        return run;
    }
    const PointSet& ps = w.ps;
    const int d = p.d;
    const CellGrid grid(ps, p.r);
    const double r2 = p.r * p.r;
    const double c_lim = unit_ball_volume(d) * std::pow(p.r, d) * p.lambda * p.lambda_I;
    Rng rng(derive_seed(seed, "scale.chain", 0));

    std::vector<std::uint32_t> S{w.q};
    std::vector<std::vector<std::uint32_t>> cand;
    std::vector<char> in_s(ps.size(), 0);
    in_s[w.q] = 1;
    auto neighbours = [&](std::uint32_t x) {
        std::vector<std::uint32_t> out;
        const auto px = ps.point(x);
        grid.for_each_near(px, 1, [&](std::uint32_t y) {
            if (y != x && squared_distance(px, ps.point(y)) <= r2) out.push_back(y);
        });
        std::sort(out.begin(), out.end());
        return out;
    };
    cand.push_back(neighbours(w.q));
    const auto q = ps.point(w.q);
    run.Z.emplace_back(q.begin(), q.end());
    if (limit) {
        limit->alpha = alpha;
        limit->seed = seed;
        limit->complete = true;
        limit->Z.push_back(Point(d, 0.0));
    }

    bool halted = false;
    for (int step = 1; step <= p.k; ++step) {
        const Draws dr = next_draws(rng, d);
        std::optional<Leaf> leaf;
        if (!halted) {
            std::vector<std::vector<std::uint32_t>> live(S.size());
            std::size_t N = 0;
            for (std::size_t i = 0; i < S.size(); ++i) {
                for (auto y : cand[i]) {
                    if (!in_s[y]) live[i].push_back(y);
                }
                N += live[i].size();
            }
            if (N == 0) {
                halted = true;
            } else {
                run.T.push_back(dr.E / (static_cast<double>(N) * p.lambda_I / alpha));
                std::size_t i = 0;
                double cum = static_cast<double>(live[0].size());
                while (dr.u0 * static_cast<double>(N) >= cum && i + 1 < S.size()) {
                    cum += static_cast<double>(live[++i].size());
                }
                const auto px = ps.point(S[i]);
                std::vector<Point> cube;
                for (auto y : live[i]) {
                    Point rel(d);
                    const auto py = ps.point(y);
                    for (int a = 0; a < d; ++a) rel[a] = py[a] - px[a];
                    Point c = ball_to_cube(rel, p.r);
                    c[0] = std::min(c[0], std::nextafter(1.0, 0.0));
                    cube.push_back(std::move(c));
                }
                std::vector<std::uint32_t> members(live[i].size());
                std::iota(members.begin(), members.end(), 0u);
                std::vector<Leaf> leaves;
                partition(members, cube, 0, Point(d, 0.0), Point(d, 1.0), leaves);
                const auto j = std::min(leaves.size() - 1,
                                        static_cast<std::size_t>(dr.u * static_cast<double>(leaves.size())));
                const std::uint32_t y = live[i][leaves[j].item];
                leaf = leaves[j];
                S.push_back(y);
                in_s[y] = 1;
                cand.push_back(neighbours(y));
                const auto py = ps.point(y);
                run.Z.emplace_back(py.begin(), py.end());
            }
        }
        if (limit) {
            const std::size_t m = limit->Z.size();
            limit->T.push_back(dr.E / (static_cast<double>(m) * c_lim));
            const std::size_t parent =
                std::min(m - 1, static_cast<std::size_t>(dr.u0 * static_cast<double>(m)));
            const Point cube = leaf ? cell_point(*leaf, dr.jitter) : dr.jitter;
            limit->Z.push_back(limit_child(limit->Z[parent], cube, p.r));
        }
    }
    run.complete = !halted;
    return run;
}

}  // namespace

RescaledRun rescaled_richardson_run(double alpha, const ScalingParams& p, std::uint64_t seed, RunMode mode) {
    p.validate();
    if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
    return mode == RunMode::direct ? direct_run(alpha, p, seed) : chain_run(alpha, p, seed, nullptr);
}

CoupledRun coupled_run(double alpha, const ScalingParams& p, std::uint64_t seed) {
    p.validate();
    if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
    CoupledRun out;
    out.scaled = chain_run(alpha, p, seed, &out.limit);
    return out;
}

GrowthTrace BranchingTree::trace() const {
    std::vector<double> z;
    std::vector<VertexId> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        z.insert(z.end(), nodes[i].begin(), nodes[i].end());
        ids.push_back(static_cast<VertexId>(i));
    }
    return GrowthTrace(dim, birth, std::move(z), std::move(ids), 0);
}

BranchingTree branching_run(const ScalingParams& p, std::uint64_t seed) {
    p.validate();
    const double rate = unit_ball_volume(p.d) * std::pow(p.r, p.d) * p.lambda * p.lambda_I;
    Rng rng(derive_seed(seed, "scale.chain", 0));
    BranchingTree tree;
    tree.dim = p.d;
    tree.nodes.push_back(Point(p.d, 0.0));
    tree.parent.push_back(-1);
    tree.birth.push_back(0.0);
    for (int step = 1; step <= p.k; ++step) {
        const Draws dr = next_draws(rng, p.d);
        const std::size_t m = tree.nodes.size();
        const auto parent = std::min(m - 1, static_cast<std::size_t>(dr.u0 * static_cast<double>(m)));
        Point child = cube_to_ball(dr.jitter, p.r);
        for (int a = 0; a < p.d; ++a) child[a] += tree.nodes[parent][a];
        tree.birth.push_back(tree.birth.back() + dr.E / (static_cast<double>(m) * rate));
        tree.nodes.push_back(std::move(child));
        tree.parent.push_back(static_cast<std::ptrdiff_t>(parent));
    }
    return tree;
}

RescaledRun limit_kernel_chain(const ScalingParams& p, std::uint64_t seed) {
    p.validate();
    Rng rng(derive_seed(seed, "scale.chain", 0));
    RescaledRun run;
    run.seed = seed;
    run.complete = true;
    run.giant_fraction = 1.0;
    run.Z.push_back(Point(p.d, 0.0));
    for (int step = 1; step <= p.k; ++step) {
        const Draws dr = next_draws(rng, p.d);
        // L(S, .) is exponential with rate |S| v_d r^d lambda lambda_I; K(S, .)
        // picks a source uniformly and a uniform point of its ball.
        const double rate = static_cast<double>(run.Z.size()) * unit_ball_volume(p.d) * std::pow(p.r, p.d) *
                            p.lambda * p.lambda_I;
        run.T.push_back(dr.E / rate);
        const std::size_t m = run.Z.size();
        const auto src = std::min(m - 1, static_cast<std::size_t>(dr.u0 * static_cast<double>(m)));
        run.Z.push_back(limit_child(run.Z[src], dr.jitter, p.r));
    }
    return run;
}

std::vector<ConvergenceRow> convergence_experiment(const ConvergenceConfig& cfg) {
    cfg.params.validate();
    if (cfg.alphas.empty() || cfg.runs < 2) throw ParameterError("converge: need alphas and at least 2 runs");
    if (!std::is_sorted(cfg.alphas.begin(), cfg.alphas.end())) throw ParameterError("converge: alphas must increase");
    const ScalingParams& p = cfg.params;
    const int d = p.d;
    const double c_lim = unit_ball_volume(d) * std::pow(p.r, d) * p.lambda * p.lambda_I;
    std::vector<ConvergenceRow> rows;
    for (double alpha : cfg.alphas) {
        std::vector<CoupledRun> runs(cfg.runs);
        parallel_for(cfg.runs, cfg.threads, [&](std::size_t i) {
            const std::uint64_t s = derive_seed(cfg.seed, "conv.run", i);
            if (cfg.coupled) {
                runs[i] = coupled_run(alpha, p, s);
            } else {
                runs[i].scaled = rescaled_richardson_run(alpha, p, s, RunMode::direct);
                runs[i].limit = limit_kernel_chain(p, derive_seed(s, "conv.limit", 0));
            }
        });
        std::size_t sub = 0, halted = 0;
        std::vector<double> norms;
        Point mean_z0(d, 0.0);
        for (const auto& r : runs) {
            if (r.scaled.subcritical) {
                ++sub;
                continue;
            }
            if (!r.scaled.complete) ++halted;
            norms.push_back(norm(r.scaled.Z[0]));
            for (int a = 0; a < d; ++a) mean_z0[a] += r.scaled.Z[0][a];
        }
        const std::size_t used = runs.size() - sub;
        auto row = [&](const char* stat, int coord, double v) { rows.push_back({alpha, stat, coord, v}); };
        row("runs_used", 0, static_cast<double>(used));
        row("subcritical_rate", 0, static_cast<double>(sub) / static_cast<double>(runs.size()));
        row("halt_rate", 0, used ? static_cast<double>(halted) / static_cast<double>(used) : 0.0);
        if (used == 0) continue;
        for (double& v : mean_z0) v /= static_cast<double>(used);
        row("median_norm_Z0", 0, stats::median(norms));
        row("mean_norm_Z0", 0, stats::mean(norms));
        row("norm_mean_Z0", 0, norm(mean_z0));
        for (int i = 1; i <= p.k; ++i) {
            std::vector<double> ta, tl, za, zl;
            double fa = 0.0, fl = 0.0;
            const double t_width = 2.0 / (static_cast<double>(i) * c_lim);
            const Point origin(d, 0.0);
            const double z_width = (i + 1) * p.r;
            for (const auto& r : runs) {
                if (r.scaled.subcritical) continue;
                tl.push_back(r.limit.T[i - 1]);
                zl.insert(zl.end(), r.limit.Z[i].begin(), r.limit.Z[i].end());
                fl += stats::bump(r.limit.Z[i], origin, z_width) * stats::bump(r.limit.T[i - 1], 0.0, t_width);
                if (r.scaled.T.size() < static_cast<std::size_t>(i)) continue;
                ta.push_back(r.scaled.T[i - 1]);
                za.insert(za.end(), r.scaled.Z[i].begin(), r.scaled.Z[i].end());
                fa += stats::bump(r.scaled.Z[i], origin, z_width) * stats::bump(r.scaled.T[i - 1], 0.0, t_width);
            }
            if (ta.empty()) continue;
            row("ks_T", i, stats::ks_two_sample(ta, tl).statistic);
            row("energy_Z", i, stats::energy_distance(za, zl, d));
            row("testfn", i, std::abs(fa / static_cast<double>(ta.size()) - fl / static_cast<double>(tl.size())));
        }
    }
    return rows;
}

double table_value(std::span<const ConvergenceRow> rows, double alpha, const std::string& statistic,
                   int coordinate) {
    for (const auto& r : rows) {
        if (r.alpha == alpha && r.statistic == statistic && r.coordinate == coordinate) return r.value;
    }
    throw ParameterError("no table entry for " + statistic);
}

void write_kernel_csv(const KernelEstimate& k, std::ostream& out) {
    std::vector<std::string> row;
    for (int a = 0; a < k.dim; ++a) row.push_back("z" + std::to_string(a));
    row.emplace_back("mass");
    row.emplace_back("se");
    write_csv_row(out, row);
    for (const auto& [z, m] : k.masses) {
        row.clear();
        for (auto v : z) row.push_back(std::to_string(v));
        row.push_back(format_double(m.mass));
        row.push_back(format_double(m.se));
        write_csv_row(out, row);
    }
}

void write_convergence_csv(std::span<const ConvergenceRow> rows, std::ostream& out) {
    write_csv_row(out, {"alpha", "statistic", "coordinate", "value"});
    for (const auto& r : rows) {
        write_csv_row(out, {format_double(r.alpha), r.statistic, std::to_string(r.coordinate), format_double(r.value)});
    }
}

}  // namespace rggfpp
