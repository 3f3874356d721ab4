#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rggfpp/fpp.hpp"
#include "rggfpp/geograph.hpp"

namespace rggfpp {

enum class ShapeMode { annealed, quenched };

struct ShapeConfig {
    double lambda = 1.0;
    double r = 2.0;
    int d = 2;
    PassageSpec passage = PassageSpec::exponential(1.0);
    double half_width = 0.0;  // 0: smallest box holding max(s) plus margin
    double margin = 0.1;  // boundary margin as a fraction of L
    ShapeMode mode = ShapeMode::annealed;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double min_giant_fraction = 0.5;  // below this a replica counts as subcritical
    double subcritical_quota = 0.2;
    /// Rotation applied to every sample before graph construction (d*d,
    /// row-major); empty means none.
    std::vector<double> rotation;

    double resolved_half_width(double s_max) const;
    void validate() const;
};

struct ShapeProfile {
    std::vector<Point> directions;
    std::vector<double> s_list;
    std::size_t seeds = 0;
    // samples[u][seed][j] = T(o, s_j u) / s_j; NaN for subcritical replicas.
    std::vector<std::vector<std::vector<double>>> samples;
    std::vector<double> mu;  // per direction, at the largest s
    std::vector<double> mu_se;
    std::vector<std::vector<double>> mu_by_s;  // [u][j]
    double isotropy = 0.0;  // (max - min) / median of mu
    double phi = 0.0;  // 1 / median(mu)
    std::size_t subcritical = 0;
    std::vector<std::string> warnings;

    /// (max - min) / median over directions of the seed means at s_list[j].
    double spread(std::size_t j) const;
};

/// Time constant per direction: for each (direction, seed) a fresh sample
/// (annealed) or a fixed graph with a fresh weight seed (quenched), then
/// T(q(o), q(s u)) / s for every s. Throws SubcriticalQuotaError when more
/// than the quota of replicas is subcritical.
ShapeProfile directional_constants(const ShapeConfig& cfg, std::span<const Point> directions,
                                   std::span<const double> s_list, std::size_t n_seeds);

/// Fraction of bootstrap resamples (seeds resampled per direction) where
/// spread(j_late) < spread(j_early).
double bootstrap_spread_fraction(const ShapeProfile& profile, std::size_t j_early, std::size_t j_late,
                                 std::size_t resamples, std::uint64_t seed);

struct ShapeError {
    double eps = 0.0;
    double eps_in = 0.0;
    double eps_out = 0.0;
    std::size_t reached_probes = 0;
    /// The ball (1 + eps) B_{phi t} does not fit in the probe region, so
    /// eps_out may be underestimated.
    bool truncated = false;
};

/// eps_out = max over reached probes of (|x|/R - 1)+, eps_in = max over
/// unreached probes with |x| < R of (1 - |x|/R), R = radius; |x| is measured
/// from `center`.
ShapeError shape_error(const ProbeGrid& probes, std::span<const char> reached, std::span<const double> center,
                       double radius, const Box& region);

/// Same, for the growth set of a passage field at time t with R = phi t.
ShapeError shape_error(const PassageField& field, const ClusterMap& cmap, double phi, double t, const Box& region,
                       double pitch);

/// Per-probe first-passage times T(q(x)) (kUnreached where unreached).
std::vector<double> probe_times(const PassageField& field, const ClusterMap& cmap, const ProbeGrid& probes);

ShapeError shape_error_from_times(const ProbeGrid& probes, std::span<const double> times,
                                  std::span<const double> center, double phi, double t, const Box& region);

/// 1 / (v_d r^d lambda).
double pc_lower_bound(double lambda, double r, int d);

/// Open edges (tau_e = 0 under bernoulli(p)) restricted to the giant; returns
/// the largest open cluster size divided by the giant size. Edge uniforms
/// come from `weight_seed`, so sweeping p with one seed is exactly coupled.
double open_cluster_fraction(const Geograph& g, double p, std::uint64_t weight_seed);

/// True when the open subgraph at p has exactly one cluster covering the giant.
bool open_subgraph_is_giant(const Geograph& g, double p, std::uint64_t weight_seed);

struct PercolationConfig {
    double lambda = 1.0;
    double r = 2.0;
    int d = 2;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct PercolationReport {
    double p = 0.0;
    double threshold = 0.0;
    std::vector<double> box_sizes;
    std::vector<std::vector<double>> fractions;  // [box][seed]
    std::vector<double> median_fraction;  // per box
};

PercolationReport bond_percolation(const PercolationConfig& cfg, double p, std::span<const double> box_sizes,
                                   std::size_t n_seeds);

/// Coupled sweep: every p reuses the same graphs and edge uniforms.
std::vector<PercolationReport> percolation_sweep(const PercolationConfig& cfg, std::span<const double> p_grid,
                                                 std::span<const double> box_sizes, std::size_t n_seeds);

void write_profile_csv(const ShapeProfile& profile, std::ostream& out);
void write_percolation_csv(std::span<const PercolationReport> reports, std::ostream& out);

/// SVG of a 2-d reached set: giant vertices, reached probes shaded and the
/// rings (1 - eps) phi t and (1 + eps) phi t.
std::string reached_set_svg(const PassageField& field, const ClusterMap& cmap, double phi, double t,
                            const ShapeError& err, const Box& region, double pitch);

/// SVG of a 2-d graph: edges, giant highlighted; with `open_p` the open edges
/// of the giant are drawn in a third colour.
std::string graph_svg(const Geograph& g, std::optional<double> open_p = std::nullopt,
                      std::uint64_t weight_seed = 0);

}  // namespace rggfpp
