#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rggfpp/fpp.hpp"
#include "rggfpp/geometry.hpp"

namespace rggfpp {

enum class ExperimentKind { ppp, rgg, fpp, shape, perc, scale };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct FppSection {
    std::optional<Point> source;  // default: the origin
    std::vector<double> t_values;  // growth-set snapshots
    double probe_pitch = 0.0;  // 0: r/4

    bool operator==(const FppSection&) const = default;
};

struct ShapeSection {
    std::string task = "profile";  // profile | error
    int directions = 16;  // 2-d count; d >= 3 always uses the cube directions
    std::vector<double> s_list{20.0, 60.0};
    std::size_t seeds = 40;
    std::string mode = "annealed";  // annealed | quenched
    double margin = 0.1;
    std::size_t bootstrap = 1000;
    // error task
    std::vector<double> t_list{10.0, 40.0};
    double phi = 0.0;  // 0: estimate from a pilot profile
    std::size_t phi_seeds = 8;
    double probe_pitch = 0.0;

    bool operator==(const ShapeSection&) const = default;
};

struct PercSection {
    std::vector<double> p_grid{0.0, 0.04};
    std::vector<double> box_sizes{50.0, 100.0, 200.0};
    std::size_t seeds = 20;

    bool operator==(const PercSection&) const = default;
};

struct ScaleSection {
    std::string task = "converge";  // kernels | converge | reg
    std::vector<double> alphas{100.0, 1000.0, 10000.0};
    double delta = 0.25;
    int k = 1;
    std::size_t runs = 500;
    std::vector<Point> S;  // empty: the origin
    std::size_t mc_samples = 20000;
    bool coupled = true;
    double ell = 2.0;

    bool operator==(const ScaleSection&) const = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ppp;
    double lambda = 1.0;
    double r = 2.0;
    int d = 2;
    double box = 10.0;  // half-width L
    double lambda_I = 1.0;
    PassageSpec passage = PassageSpec::exponential(1.0);
    std::uint64_t seed = 1;
    std::size_t replicas = 1;
    unsigned threads = 0;
    bool svg = false;  // 2-d snapshots
    FppSection fpp;
    ShapeSection shape;
    PercSection perc;
    ScaleSection scale;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// Strict parsing: unknown fields at any level are a ParameterError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
nlohmann::json serialize_config(const ExperimentConfig& cfg);

struct RunManifest {
    nlohmann::json config;
    std::string config_hash;  // sha256 of the canonical config dump
    std::uint64_t root_seed = 0;
    std::vector<std::uint64_t> replica_seeds;
    std::string version;
    double wall_clock_seconds = 0.0;
    std::string started_utc;
    std::map<std::string, std::string> outputs;  // file name -> sha256
    std::vector<std::string> warnings;
    nlohmann::json summary = nlohmann::json::object();

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

std::string artifact_version();

/// Where outputs go: a directory, or a primary file whose stem prefixes the
/// other outputs.
struct OutputTarget {
    std::filesystem::path dir;
    std::string prefix;  // "" or "<stem>."
    std::optional<std::string> primary;  // requested primary file name

    static OutputTarget parse(const std::filesystem::path& out);
    std::filesystem::path file(const std::string& name) const;
};

/// Validates, dispatches to the owning module, writes outputs and
/// manifest.json. Throws rggfpp::Error subclasses on failure.
RunManifest run_experiment(const ExperimentConfig& cfg, const OutputTarget& out);

/// Re-runs the config stored in a manifest and compares output digests.
/// Returns the names of outputs whose digests differ.
std::vector<std::string> verify_manifest(const RunManifest& m, const OutputTarget& out);

}  // namespace rggfpp
