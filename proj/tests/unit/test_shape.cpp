#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rggfpp/errors.hpp"
#include "rggfpp/shape.hpp"

using namespace rggfpp;

namespace {

// Probes inside radius R marked reached.
std::vector<char> disk(const ProbeGrid& g, double R) {
    std::vector<char> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coords[2 * i], y = g.coords[2 * i + 1];
        out[i] = std::hypot(x, y) <= R;
    }
    return out;
}

}  // namespace

TEST_CASE("shape error on constructed reached sets") {
    const Box region = Box::centered(2, 30.0);
    const auto probes = ProbeGrid::over(region, 0.1);
    const Point o{0.0, 0.0};
    const double R = 20.0;
    const auto exact = shape_error(probes, disk(probes, R), o, R, region);
    CHECK(exact.eps == 0.0);
    const auto shrunk = shape_error(probes, disk(probes, 0.9 * R), o, R, region);
    CHECK(std::abs(shrunk.eps - 0.1) <= 0.1 / R);
    CHECK_FALSE(shrunk.truncated);
    std::vector<char> none(probes.size(), 0);
    CHECK_THROWS_AS(shape_error(probes, none, o, R, region), ParameterError);
}

TEST_CASE("pc lower bound") {
    CHECK(pc_lower_bound(1.0, 2.0, 2) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(pc_lower_bound(1.0, 1.0, 3) == doctest::Approx(0.2387324).epsilon(1e-7));
}

TEST_CASE("open subgraph extremes") {
    const auto g = build_rgg(sample_ppp(1.0, Box::centered(2, 20.0), 3), 2.0);
    // tau = 0 with probability p: p = 1 opens every edge
    CHECK(open_subgraph_is_giant(g, 1.0, 1));
    CHECK(open_cluster_fraction(g, 1.0, 1) == 1.0);
    CHECK(open_cluster_fraction(g, 0.0, 1) == doctest::Approx(1.0 / static_cast<double>(g.giant_vertices().size())));
}

TEST_CASE("percolation sweep is monotone in p") {
    const PercolationConfig cfg{1.0, 2.0, 2, 5, 1};
    const std::vector<double> grid{0.0, 0.02, 0.05, 0.2, 1.0};
    const std::vector<double> boxes{20.0};
    const auto reps = percolation_sweep(cfg, grid, boxes, 4);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t i = 1; i < grid.size(); ++i) CHECK(reps[i].fractions[0][s] >= reps[i - 1].fractions[0][s]);
}

TEST_CASE("constant weights: profile symmetric in +-u") {
    ShapeConfig cfg;
    cfg.lambda = 1.0;
    cfg.r = 2.0;
    cfg.passage = PassageSpec::constant(1.0);
    cfg.seed = 4;
    cfg.threads = 1;
    const auto dirs = default_directions(2, 4);
    const std::vector<double> s{15.0};
    const auto prof = directional_constants(cfg, dirs, s, 12);
    REQUIRE(prof.mu.size() == 4);
    for (std::size_t u = 0; u < 2; ++u) {
        const double se = std::hypot(prof.mu_se[u], prof.mu_se[u + 2]);
        CHECK(std::abs(prof.mu[u] - prof.mu[u + 2]) <= 3 * se + 1e-12);
    }
    // hop counts times 1 are at least s / r
    for (double m : prof.mu) CHECK(m >= 0.5 - 1e-9);
}

TEST_CASE("svg") {
    const auto empty = build_rgg(PointSet(Box::centered(2, 5.0), 1.0, 0, {}), 1.0);
    const auto frame = graph_svg(empty);
    CHECK(frame.find("<svg") != std::string::npos);
    CHECK(frame.find("</svg>") != std::string::npos);
    CHECK(frame.find("<line") == std::string::npos);
    const auto g = build_rgg(sample_ppp(1.0, Box::centered(2, 10.0), 8), 2.0);
    CHECK(graph_svg(g, 0.3, 2) == graph_svg(g, 0.3, 2));
    const auto g3 = build_rgg(sample_ppp(1.0, Box::centered(3, 3.0), 8), 1.0);
    CHECK_THROWS_AS(graph_svg(g3), UnsupportedDimensionError);
}
