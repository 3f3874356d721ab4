#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "rggfpp/errors.hpp"
#include "rggfpp/experiment.hpp"
#include "rggfpp/fpp.hpp"
#include "rggfpp/geograph.hpp"
#include "rggfpp/point_process.hpp"
#include "rggfpp/scaling.hpp"
#include "rggfpp/shape.hpp"

namespace py = pybind11;
using namespace rggfpp;

namespace {

py::array_t<double> coords_of(const PointSet& ps) {
    py::array_t<double> out({ps.size(), static_cast<std::size_t>(ps.dim())});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (int a = 0; a < ps.dim(); ++a) m(i, a) = ps.point(i)[a];
    return out;
}

PointSet points_from(py::array_t<double, py::array::c_style | py::array::forcecast> xy, double half_width) {
    if (xy.ndim() != 2) throw ParameterError("points must be an (n, d) array");
    const auto d = static_cast<int>(xy.shape(1));
    std::vector<double> c(xy.data(), xy.data() + xy.size());
    return PointSet(Box::centered(d, half_width), 1.0, 0, std::move(c));
}

PassageSpec spec_from(const std::string& text) { return nlohmann::json::parse(text).get<PassageSpec>(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Random geometric graphs and first-passage percolation";

    py::register_exception<Error>(m, "RggfppError");

    m.def("version", &artifact_version);

    m.def(
        "sample_ppp",
        [](double intensity, double half_width, int d, std::uint64_t seed) {
            return coords_of(sample_ppp(intensity, Box::centered(d, half_width), seed));
        },
        py::arg("intensity"), py::arg("half_width"), py::arg("d") = 2, py::arg("seed") = 1);

    m.def(
        "rgg_edges",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> xy, double r, double half_width) {
            const auto g = build_rgg(points_from(xy, half_width), r);
            std::vector<std::pair<VertexId, VertexId>> e;
            for (VertexId u = 0; u < g.vertex_count(); ++u)
                for (VertexId v : g.neighbors(u))
                    if (u < v) e.emplace_back(u, v);
            return py::make_tuple(coords_of(g.points()), e);
        },
        py::arg("points"), py::arg("r"), py::arg("half_width"),
        "Sorted points and the edge list of the strict disk graph.");

    m.def(
        "passage_times",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> xy, double r, double half_width,
           const std::string& passage, std::uint64_t seed, VertexId source) {
            const auto g = build_rgg(points_from(xy, half_width), r);
            const auto w = assign_passage_times(g, spec_from(passage), seed);
            return shortest_times(g.adjacency(), w, source);
        },
        py::arg("points"), py::arg("r"), py::arg("half_width"), py::arg("passage"), py::arg("seed"),
        py::arg("source") = 0, "First-passage times from `source` (inf when unreached); passage is a JSON spec.");

    m.def("pc_lower_bound", &pc_lower_bound, py::arg("lambda_"), py::arg("r"), py::arg("d"));

    m.def(
        "check_A1",
        [](const std::string& passage, double lambda, double r, int d) {
            const auto c = check_A1(spec_from(passage), lambda, r, d);
            return py::dict(py::arg("satisfied") = c.satisfied, py::arg("atom") = c.atom,
                            py::arg("threshold") = c.threshold);
        },
        py::arg("passage"), py::arg("lambda_"), py::arg("r"), py::arg("d"));

    m.def(
        "n_alpha",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> xy, double half_width,
           std::vector<Point> S, double r) { return n_alpha(points_from(xy, half_width), S, r); },
        py::arg("points"), py::arg("half_width"), py::arg("S"), py::arg("r"));

    m.def(
        "branching_run",
        [](int k, double r, double lambda, double lambda_I, int d, std::uint64_t seed) {
            ScalingParams p;
            p.k = k;
            p.r = r;
            p.lambda = lambda;
            p.lambda_I = lambda_I;
            p.d = d;
            const auto t = branching_run(p, seed);
            return py::make_tuple(t.nodes, t.parent, t.birth);
        },
        py::arg("k"), py::arg("r") = 1.0, py::arg("lambda_") = 1.0, py::arg("lambda_I") = 1.0, py::arg("d") = 2,
        py::arg("seed") = 1, "(nodes, parent, birth) of a branching run with k births.");

    m.def(
        "run_experiment",
        [](const std::string& config, const std::string& out) {
            const auto man = run_experiment(parse_config_text(config), OutputTarget::parse(out));
            return man.to_json().dump();
        },
        py::arg("config"), py::arg("out"), "Run a JSON config; returns the manifest as JSON text.");
}
