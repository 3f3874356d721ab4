// rggfpp: command-line front end. Every subcommand builds an
// ExperimentConfig and hands it to run_experiment.
#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rggfpp/errors.hpp"
#include "rggfpp/experiment.hpp"
#include "rggfpp/io.hpp"

using namespace rggfpp;
using nlohmann::json;

namespace {

int fail(ExitCode code, const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}}.dump() << '\n';
    return static_cast<int>(code);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t end = std::min(s.find(',', pos), s.size());
        double v = 0.0;
        const auto res = std::from_chars(s.data() + pos, s.data() + end, v);
        if (res.ec != std::errc() || res.ptr != s.data() + end) throw ParameterError("bad number list: " + s);
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

// a:b:step, inclusive of b up to round-off.
std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t end = std::min(s.find(':', pos), s.size());
        double v = 0.0;
        const auto res = std::from_chars(s.data() + pos, s.data() + end, v);
        if (res.ec != std::errc() || res.ptr != s.data() + end) throw ParameterError("bad grid: " + s);
        parts.push_back(v);
        pos = end + 1;
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw ParameterError("grid must be a:b:step");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random geometric graphs, first-passage percolation and Richardson scaling"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, manifest_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("--config", config_path, "JSON experiment config")->envname("RGGFPP_CONFIG");
    app.add_option("--seed", seed, "root seed (overrides the config)")->envname("RGGFPP_SEED");
    app.add_option("--threads", threads, "worker threads, 0 = all")->envname("RGGFPP_THREADS");
    app.add_option("--out", out_path, "output directory, or a primary file path")->envname("RGGFPP_OUT");

    std::optional<ExperimentKind> kind;
    json overrides = json::object();
    auto set_kind = [&](ExperimentKind k) { kind = k; };

    auto* run = app.add_subcommand("run", "run a config, or re-run and verify a manifest");
    run->add_option("--manifest", manifest_path, "manifest.json to reproduce");

    auto* ppp = app.add_subcommand("ppp", "Poisson point samples")->require_subcommand(1);
    ppp->add_subcommand("sample", "write points as NDJSON")->callback([&] { set_kind(ExperimentKind::ppp); });
    auto* rgg = app.add_subcommand("rgg", "disk graphs")->require_subcommand(1);
    rgg->add_subcommand("build", "write the graph as NDJSON")->callback([&] { set_kind(ExperimentKind::rgg); });

    auto* fpp = app.add_subcommand("fpp", "first-passage percolation")->require_subcommand(1);
    fpp->add_subcommand("run", "passage times and growth trace")->callback([&] { set_kind(ExperimentKind::fpp); });

    auto* shape = app.add_subcommand("shape", "time constant and limit shape")->require_subcommand(1);
    std::size_t shape_seeds = 0;
    for (const char* task : {"profile", "error"}) {
        auto* sub = shape->add_subcommand(task, std::string("shape ") + task);
        sub->add_option("--seeds", shape_seeds, "replicas per direction (profile) or runs (error)");
        sub->callback([&, task] {
            set_kind(ExperimentKind::shape);
            overrides["shape"]["task"] = task;
            if (shape_seeds) overrides["shape"]["seeds"] = shape_seeds;
        });
    }

    auto* perc = app.add_subcommand("perc", "bond percolation")->require_subcommand(1);
    std::string p_grid, boxes;
    std::size_t perc_seeds = 0;
    auto* sweep = perc->add_subcommand("sweep", "coupled sweep over p");
    sweep->add_option("--p-grid", p_grid, "a:b:step or a single p");
    sweep->add_option("--boxes", boxes, "comma-separated box half-widths");
    sweep->add_option("--seeds", perc_seeds, "seeds per box");
    sweep->callback([&] {
        set_kind(ExperimentKind::perc);
        if (!p_grid.empty()) overrides["perc"]["p_grid"] = parse_grid(p_grid);
        if (!boxes.empty()) overrides["perc"]["box_sizes"] = parse_list(boxes);
        if (perc_seeds) overrides["perc"]["seeds"] = perc_seeds;
    });

    auto* scale = app.add_subcommand("scale", "rescaled Richardson process")->require_subcommand(1);
    std::string alpha, alphas, sources;
    double delta = 0.0;
    int k = 0;
    std::size_t runs = 0;
    auto* kernels = scale->add_subcommand("kernels", "empirical vs limit spatial kernels");
    kernels->add_option("--alpha", alpha, "alpha (comma list allowed)");
    kernels->add_option("--delta", delta, "cube side");
    kernels->add_option("--S", sources, "'origin' or JSON list of points");
    kernels->callback([&] {
        set_kind(ExperimentKind::scale);
        overrides["scale"]["task"] = "kernels";
        if (!alpha.empty()) overrides["scale"]["alphas"] = parse_list(alpha);
        if (delta > 0.0) overrides["scale"]["delta"] = delta;
        if (!sources.empty() && sources != "origin") {
            try {
                overrides["scale"]["S"] = json::parse(sources);
            } catch (const json::exception&) {
                throw ParameterError("--S must be 'origin' or a JSON list of points");
            }
        }
    });
    auto* converge = scale->add_subcommand("converge", "convergence table along an alpha grid");
    converge->add_option("--alphas", alphas, "comma-separated alphas");
    converge->add_option("--k", k, "jumps per run");
    converge->add_option("--runs", runs, "runs per alpha");
    converge->callback([&] {
        set_kind(ExperimentKind::scale);
        overrides["scale"]["task"] = "converge";
        if (!alphas.empty()) overrides["scale"]["alphas"] = parse_list(alphas);
        if (k > 0) overrides["scale"]["k"] = k;
        if (runs > 0) overrides["scale"]["runs"] = runs;
    });
    auto* reg = scale->add_subcommand("reg", "REG concentration frequency");
    reg->add_option("--alphas", alphas, "comma-separated alphas");
    reg->callback([&] {
        set_kind(ExperimentKind::scale);
        overrides["scale"]["task"] = "reg";
        if (!alphas.empty()) overrides["scale"]["alphas"] = parse_list(alphas);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(ExitCode::config, "usage", e.what());
    } catch (const Error& e) {
        return fail(e.code(), e.kind(), e.what());
    }

    try {
        const OutputTarget target = OutputTarget::parse(out_path.empty() ? "out" : out_path);
        if (!manifest_path.empty()) {
            auto m = RunManifest::from_json(json::parse(read_file(manifest_path)));
            const auto bad = verify_manifest(m, target);
            std::cout << json{{"reproduced", bad.empty()}, {"mismatched", bad}}.dump() << '\n';
            return bad.empty() ? 0 : static_cast<int>(ExitCode::failure);
        }
        json cfg = json::object();
        if (!config_path.empty()) {
            try {
                cfg = json::parse(read_file(config_path));
            } catch (const json::exception& e) {
                throw ParameterError(std::string("config is not valid JSON: ") + e.what());
            }
        } else if (!kind) {
            throw ParameterError("run needs --config or --manifest");
        }
        if (kind) cfg["kind"] = to_string(*kind);
        for (const auto& [section, values] : overrides.items()) {
            for (const auto& [key, v] : values.items()) cfg[section][key] = v;
        }
        if (seed) cfg["seed"] = *seed;
        if (threads) cfg["threads"] = *threads;
        const auto m = run_experiment(parse_config(cfg), target);
        json report = {{"outputs", m.outputs}, {"warnings", m.warnings}, {"summary", m.summary}};
        std::cout << report.dump() << '\n';
        return 0;
    } catch (const Error& e) {
        return fail(e.code(), e.kind(), e.what());
    } catch (const json::exception& e) {
        return fail(ExitCode::config, "parameter", e.what());
    } catch (const std::exception& e) {
        return fail(ExitCode::failure, "error", e.what());
    }
}
