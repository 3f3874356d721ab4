#include <doctest.h>

#include <algorithm>
#include <limits>

#include "rggfpp/errors.hpp"
#include "rggfpp/geograph.hpp"
#include "rggfpp/point_process.hpp"
#include "rggfpp/rng.hpp"

using namespace rggfpp;

namespace {

PointSet from_coords(std::vector<double> xy, double half = 5.0) {
    return PointSet(Box::centered(2, half), 1.0, 0, std::move(xy));
}

}  // namespace

TEST_CASE("edges use a strict threshold") {
    CHECK(build_rgg(from_coords({0.0, 0.0, 0.5, 0.0}), 1.0).edge_count() == 1);
    CHECK(build_rgg(from_coords({0.0, 0.0, 1.0, 0.0}), 1.0).edge_count() == 0);
    CHECK_THROWS_AS(build_rgg(from_coords({0.0, 0.0}), 0.0), ParameterError);
}

TEST_CASE("200 uniform points, r = 0.3, brute force") {
    Rng rng(3);
    std::vector<double> xy(400);
    for (double& x : xy) x = rng.uniform() * 2.0 - 1.0;
    const auto g = build_rgg(PointSet(Box::centered(2, 1.0), 1.0, 0, xy), 0.3);
    std::size_t edges = 0;
    for (VertexId u = 0; u < 200; ++u) {
        std::vector<VertexId> want;
        for (VertexId v = 0; v < 200; ++v) {
            if (u != v && squared_distance(g.points().point(u), g.points().point(v)) < 0.09) want.push_back(v);
        }
        const auto got = g.neighbors(u);
        CHECK(std::equal(got.begin(), got.end(), want.begin(), want.end()));
        edges += want.size();
    }
    CHECK(g.edge_count() == edges / 2);
}

TEST_CASE("components") {
    const auto edgeless = label_components(Adjacency::from_edges(5, {}));
    CHECK(edgeless.sizes.size() == 5);
    const std::vector<std::pair<VertexId, VertexId>> path{{0, 1}, {1, 2}};
    const auto p = label_components(Adjacency::from_edges(3, path));
    CHECK(p.sizes.size() == 1);
    CHECK(p.giant_size() == 3);
}

TEST_CASE("graph distance vs Floyd-Warshall") {
    const std::vector<std::pair<VertexId, VertexId>> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 5}, {5, 4}, {2, 5}};
    const auto adj = Adjacency::from_edges(7, e);
    const std::uint32_t inf = 1000;
    std::vector<std::vector<std::uint32_t>> fw(7, std::vector<std::uint32_t>(7, inf));
    for (int i = 0; i < 7; ++i) fw[i][i] = 0;
    for (auto [a, b] : e) fw[a][b] = fw[b][a] = 1;
    for (int k = 0; k < 7; ++k)
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j) fw[i][j] = std::min(fw[i][j], fw[i][k] + fw[k][j]);
    for (VertexId u = 0; u < 7; ++u) {
        for (VertexId v = 0; v < 7; ++v) {
            const auto d = graph_distance(adj, u, v);
            if (fw[u][v] == inf) {
                CHECK_FALSE(d.has_value());
            } else {
                REQUIRE(d.has_value());
                CHECK(*d == fw[u][v]);
            }
        }
    }
    CHECK_THROWS_AS(graph_distance(adj, 0, 9), ParameterError);
}

TEST_CASE("self-avoiding path counts") {
    CHECK(count_self_avoiding_paths(Adjacency::from_edges(1, {}), 0, 1) == 0);
    const std::vector<std::pair<VertexId, VertexId>> tri{{0, 1}, {1, 2}, {0, 2}};
    const auto adj = Adjacency::from_edges(3, tri);
    for (VertexId s = 0; s < 3; ++s) CHECK(count_self_avoiding_paths(adj, s, 2) == 2);
    CHECK_THROWS_AS(count_self_avoiding_paths(adj, 0, 50), ParameterError);
}

TEST_CASE("nearest giant vertex") {
    // Giant: 3 points in a row; one isolated far point.
    const auto g = build_rgg(from_coords({0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 4.5, 4.5}), 1.5);
    const ClusterMap cmap(g);
    const Point on{1.0, 0.0};
    CHECK(cmap.nearest(on) == 1);
    CHECK(cmap.distance_to_giant(on) == 0.0);
    const Point mid{0.5, 1.0};
    CHECK(cmap.nearest(mid) == 0);  // tie: lexicographically smaller point
    Rng rng(17);
    const auto big = build_rgg(sample_ppp(1.0, Box::centered(2, 10.0), 21), 2.0);
    const ClusterMap bmap(big);
    const auto giant = big.giant_vertices();
    for (int i = 0; i < 50; ++i) {
        const Point x{rng.uniform() * 20 - 10, rng.uniform() * 20 - 10};
        double best = std::numeric_limits<double>::infinity();
        for (VertexId v : giant) best = std::min(best, squared_distance(x, big.points().point(v)));
        CHECK(squared_distance(x, big.points().point(bmap.nearest(x))) == best);
    }
}

TEST_CASE("subcritical sample") {
    const auto g = build_rgg(from_coords({}), 1.0);
    CHECK_THROWS_AS(ClusterMap{g}, SubcriticalError);
}

TEST_CASE("theta: everything in the giant") {
    const auto g = build_rgg(sample_ppp(5.0, Box::centered(2, 5.0), 2), 3.0);
    REQUIRE(g.giant_fraction() == 1.0);
    const auto th = estimate_theta(g, 0.5);
    const Box inner = g.points().box().shrunk(0.5);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < g.vertex_count(); ++i) inside += inner.contains(g.points().point(i));
    CHECK(th.vertex_density == doctest::Approx(static_cast<double>(inside) / inner.volume()));
    CHECK(th.vertex_fraction == doctest::Approx(th.vertex_density / 5.0));
}

TEST_CASE("theta: ball-hit frequency grows with r") {
    const auto ps = std::make_shared<const PointSet>(sample_ppp(1.0, Box::centered(2, 40.0), 8));
    double last = -1.0;
    for (double r : {2.0, 2.5, 3.0}) {
        const auto th = estimate_theta(build_rgg(ps, r), 0.8, 1.0, r);
        CHECK(th.ball_hit_frequency >= 0.0);
        CHECK(th.ball_hit_frequency <= 1.0);
        CHECK(th.ball_hit_frequency >= last);
        last = th.ball_hit_frequency;
    }
}

TEST_CASE("stretch factor respects 1/r") {
    const auto g = build_rgg(sample_ppp(1.0, Box::centered(2, 40.0), 12), 2.0);
    const auto est = estimate_stretch_factor(g, default_directions(2, 8), std::vector<double>{10.0, 20.0});
    for (const auto& row : est.table)
        for (double v : row) CHECK(v >= 0.5 - 1e-9);
}
