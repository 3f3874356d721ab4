#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rggfpp/errors.hpp"
#include "rggfpp/point_process.hpp"
#include "rggfpp/rng.hpp"

using namespace rggfpp;

TEST_CASE("ppp count on [-50,50]^2 is in the Poisson(10000) bulk") {
    const auto ps = sample_ppp(1.0, Box::centered(2, 50.0), 7);
    CHECK(ps.size() >= 9600);
    CHECK(ps.size() <= 10400);
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK(ps.box().contains(ps.point(i)));
}

TEST_CASE("ppp is deterministic per seed") {
    const auto a = sample_ppp(2.0, Box::centered(2, 5.0), 3);
    const auto b = sample_ppp(2.0, Box::centered(2, 5.0), 3);
    const auto c = sample_ppp(2.0, Box::centered(2, 5.0), 4);
    CHECK(to_ndjson(a) == to_ndjson(b));
    CHECK(to_ndjson(a) != to_ndjson(c));
}

TEST_CASE("ppp mean count over seeds") {
    double sum = 0.0;
    const int n = 400;
    for (int s = 0; s < n; ++s) sum += static_cast<double>(sample_ppp(1.0, Box::centered(3, 2.0), s).size());
    // mean 64, se 8/sqrt(400) = 0.4
    CHECK(std::abs(sum / n - 64.0) < 3 * 0.4);
}

TEST_CASE("tiny window is almost always empty") {
    std::size_t total = 0;
    for (int s = 0; s < 100; ++s) total += sample_ppp(1.0, Box::centered(2, 1e-4), s).size();
    CHECK(total == 0);
}

TEST_CASE("bad parameters") {
    CHECK_THROWS_AS(sample_ppp(0.0, Box::centered(2, 1.0), 1), ParameterError);
    CHECK_THROWS_AS(sample_ppp(-1.0, Box::centered(2, 1.0), 1), ParameterError);
    CHECK_THROWS_AS(sample_ppp(1.0, Box::centered(2, 0.0), 1), ParameterError);
}

TEST_CASE("rescale") {
    const auto ps = sample_ppp(4.0, Box::centered(2, 3.0), 11);
    const auto same = rescale(ps, 1.0);
    CHECK(to_ndjson(same) == to_ndjson(ps));
    const auto half = rescale(ps, 2.0);
    CHECK(half.size() == ps.size());
    CHECK(half.intensity() == doctest::Approx(1.0));
    CHECK(half.point(0)[0] == doctest::Approx(2.0 * ps.point(0)[0]));
    CHECK_THROWS_AS(rescale(ps, 0.0), ParameterError);
}

TEST_CASE("insert and find a point") {
    const auto ps = sample_ppp(1.0, Box::centered(2, 3.0), 5);
    const Point o{0.0, 0.0};
    const auto with = insert_point(ps, o);
    CHECK(with.size() == ps.size() + 1);
    CHECK(find_point(with, o) >= 0);
}

TEST_CASE("ndjson round trip") {
    const auto ps = sample_ppp(1.0, Box::centered(2, 4.0), 9);
    std::istringstream in(to_ndjson(ps));
    const auto back = read_ndjson(in);
    REQUIRE(back.size() == ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(back.point(i)[0] == ps.point(i)[0]);
        CHECK(back.point(i)[1] == ps.point(i)[1]);
    }
}

TEST_CASE("derived streams differ") {
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
    CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
    CHECK(edge_uniform(5, 2, 9) == edge_uniform(5, 2, 9));
}
