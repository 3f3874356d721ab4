#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "rggfpp/errors.hpp"
#include "rggfpp/experiment.hpp"
#include "rggfpp/io.hpp"
#include "rggfpp/stats.hpp"

using namespace rggfpp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("rggfpp_unit_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(1e-20) == "1e-20");
    std::ostringstream out;
    write_csv_row(out, {"a", "b,c"});
    CHECK(out.str() == "a,\"b,c\"\n");
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("stats helpers") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(stats::mean(x) == 2.5);
    CHECK(stats::median(x) == 2.5);
    CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
    CHECK(stats::energy_distance(x, x, 1) == 0.0);
    const std::vector<double> y{11, 12, 13, 14};
    CHECK(stats::ks_two_sample(x, y).statistic == 1.0);
    CHECK(stats::kolmogorov_sf(0.0) == 1.0);
    CHECK(stats::bump(0.0, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(stats::bump(1.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("config round trip and strictness") {
    ExperimentConfig c;
    c.kind = ExperimentKind::shape;
    c.passage = PassageSpec::bernoulli(0.03);
    c.shape.s_list = {5.0, 7.5};
    c.seed = 99;
    const auto j = serialize_config(c);
    CHECK(parse_config(j) == c);
    CHECK(parse_config_text(j.dump()) == c);
    auto bad = j;
    bad["colour"] = 1;
    CHECK_THROWS_AS(parse_config(bad), ParameterError);
    auto bad2 = j;
    bad2["shape"]["extra"] = 1;
    CHECK_THROWS_AS(parse_config(bad2), ParameterError);
    auto neg = j;
    neg["lambda"] = -1.0;
    CHECK_THROWS_AS(parse_config(neg).validate(), ParameterError);
}

TEST_CASE("ppp run is byte-identical and verifiable") {
    ExperimentConfig c;
    c.kind = ExperimentKind::ppp;
    c.lambda = 1.0;
    c.box = 10.0;
    c.seed = 1;
    const auto a = scratch("ppp_a"), b = scratch("ppp_b");
    const auto ma = run_experiment(c, OutputTarget::parse(a));
    const auto mb = run_experiment(c, OutputTarget::parse(b));
    CHECK(read_file(a / "points.ndjson") == read_file(b / "points.ndjson"));
    CHECK(ma.outputs == mb.outputs);
    CHECK(fs::exists(a / "manifest.json"));
    const auto back = RunManifest::from_json(nlohmann::json::parse(read_file(a / "manifest.json")));
    CHECK(back.config_hash == ma.config_hash);
    CHECK(verify_manifest(back, OutputTarget::parse(scratch("ppp_c"))).empty());
}

TEST_CASE("shape run with A1 violated warns and proceeds") {
    ExperimentConfig c;
    c.kind = ExperimentKind::shape;
    c.passage = PassageSpec::bernoulli(0.5);
    c.shape.s_list = {6.0};
    c.shape.seeds = 3;
    c.shape.directions = 4;
    c.shape.bootstrap = 10;
    c.threads = 1;
    const auto m = run_experiment(c, OutputTarget::parse(scratch("shape_a1")));
    bool found = false;
    for (const auto& w : m.warnings) found |= w.find("A1") != std::string::npos;
    CHECK(found);
}

TEST_CASE("scale converge writes one row per alpha and statistic") {
    ExperimentConfig c;
    c.kind = ExperimentKind::scale;
    c.r = 1.0;
    c.scale.task = "converge";
    c.scale.alphas = {100.0, 1000.0};
    c.scale.runs = 20;
    c.threads = 1;
    const auto dir = scratch("conv");
    run_experiment(c, OutputTarget::parse(dir));
    const auto text = read_file(dir / "conv.csv");
    CHECK(text.find("\n100,ks_T,1,") != std::string::npos);
    CHECK(text.find("\n1000,ks_T,1,") != std::string::npos);
    CHECK(text.find("\n1000,median_norm_Z0,0,") != std::string::npos);
}

TEST_CASE("svg snapshot is deterministic and needs d = 2") {
    ExperimentConfig c;
    c.kind = ExperimentKind::rgg;
    c.svg = true;
    const auto a = scratch("svg_a"), b = scratch("svg_b");
    const auto ma = run_experiment(c, OutputTarget::parse(a));
    run_experiment(c, OutputTarget::parse(b));
    REQUIRE(ma.outputs.count("graph.svg"));
    CHECK(read_file(a / "graph.svg") == read_file(b / "graph.svg"));
    c.d = 3;
    c.box = 3.0;
    c.r = 1.0;
    CHECK_THROWS_AS(run_experiment(c, OutputTarget::parse(scratch("svg_3d"))), UnsupportedDimensionError);
}

TEST_CASE("output target") {
    const auto dir = OutputTarget::parse("out/run1");
    CHECK(dir.prefix.empty());
    const auto file = OutputTarget::parse("out/k.csv");
    CHECK(file.prefix == "k.");
    CHECK(file.primary == std::optional<std::string>("k.csv"));
}
