#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rggfpp/fpp.hpp"
#include "rggfpp/point_process.hpp"

namespace rggfpp {

using CubeIndex = std::vector<std::int64_t>;

/// Index z of the cube delta*z + [-delta/2, delta/2)^d containing y.
CubeIndex cube_index(std::span<const double> y, double delta);

/// Indices of the given points in the sample; ParameterError when a point
/// is not in the sample.
std::vector<std::size_t> find_sources(const PointSet& ps, std::span<const Point> S);

/// Sum over x in S of the sample points y outside S with |x - y| <= r.
std::size_t n_alpha(const PointSet& ps, std::span<const Point> S, double r);
/// Same count summed the other way: over y outside S of |{x in S : |x-y| <= r}|.
std::size_t n_alpha_dual(const PointSet& ps, std::span<const Point> S, double r);

struct CubeMass {
    double mass = 0.0;
    double se = 0.0;
};

struct KernelEstimate {
    int dim = 2;
    double delta = 0.0;
    std::map<CubeIndex, CubeMass> masses;
    double rate = 0.0;  // temporal rate of the waiting-time law
    std::vector<Point> sources;
    std::string provenance;  // "empirical" or "limit"
    double alpha = 0.0;  // empirical only

    double total_mass() const;
};

/// Next-point law of the rescaled Richardson chain, aggregated on cubes:
/// mass(Q) = sum over y in Q outside S of |{x in S : |x-y| <= r}| / N.
/// rate = N * lambda_I / alpha. NoNeighborError when N = 0.
KernelEstimate empirical_spatial_kernel(const PointSet& ps, std::span<const Point> S, double r, double delta,
                                        double alpha, double lambda_I);

/// Uniform mixture over the balls B_r(x), x in S, aggregated on cubes.
/// Cubes fully inside a ball are exact; boundary cubes use stratified Monte
/// Carlo with about `mc_samples` draws, then are rescaled so each ball
/// contributes exactly 1/|S|. rate = |S| v_d r^d lambda lambda_I.
KernelEstimate limit_spatial_kernel(std::span<const Point> S, double r, double delta, std::size_t mc_samples,
                                    double lambda, double lambda_I, std::uint64_t seed = 1);

/// Sum over cubes of |m1(Q) - m2(Q)|.
double cube_tv_distance(const KernelEstimate& k1, const KernelEstimate& k2);

struct RegCheck {
    bool holds = true;
    double worst = 0.0;  // max relative deviation over qualifying cubes
    std::size_t cubes = 0;
};

/// | |P cap Q| / (intensity delta^d) - 1 | < delta for every cube of side
/// delta inside B_ell(o). The sample intensity is alpha * lambda.
RegCheck reg_check(const PointSet& ps, double ell, double delta);

enum class RunMode { direct, kernel_chain };

struct ScalingParams {
    double lambda = 1.0;
    double lambda_I = 1.0;
    double r = 1.0;
    int d = 2;
    int k = 1;
    double min_giant_fraction = 0.5;

    void validate() const;
    /// Sampling window half-width around the origin.
    double window() const { return (k + 2) * r; }
};

struct RescaledRun {
    double alpha = 0.0;
    std::vector<Point> Z;  // Z_0 .. Z_j, j <= k
    std::vector<double> T;  // T_1 .. T_j
    std::uint64_t seed = 0;
    bool complete = false;  // false when the chain halted with N = 0
    bool subcritical = false;
    double giant_fraction = 0.0;
};

/// Largest component of the strict disk graph on a sample, computed with a
/// cell merge instead of a materialized adjacency.
struct WindowComponents {
    std::vector<std::uint32_t> labels;
    std::uint32_t giant = 0;
    std::size_t giant_size = 0;
};
WindowComponents window_components(const PointSet& ps, double r);

/// Direct: sample P_{alpha lambda} on the window, FPP with Exp(lambda_I /
/// alpha) weights from q(o), first k+1 settled vertices. Kernel chain:
/// iterate the empirical spatial and temporal kernels on the same kind of
/// sample.
RescaledRun rescaled_richardson_run(double alpha, const ScalingParams& p, std::uint64_t seed, RunMode mode);

struct BranchingTree {
    int dim = 2;
    std::vector<Point> nodes;  // birth order; nodes[0] is the root at o
    std::vector<std::ptrdiff_t> parent;  // -1 for the root
    std::vector<double> birth;

    GrowthTrace trace() const;
};

/// Event-driven branching process: with m nodes the next birth comes after
/// Exp(m v_d r^d lambda lambda_I), the parent is uniform, the child uniform in
/// B_r(parent). Stops after k births.
BranchingTree branching_run(const ScalingParams& p, std::uint64_t seed);

/// The same process written as the limit kernel chain K(S, .) x L(S, .);
/// draws the same variates in the same order as branching_run.
RescaledRun limit_kernel_chain(const ScalingParams& p, std::uint64_t seed);

struct CoupledRun {
    RescaledRun scaled;
    RescaledRun limit;
};

/// Kernel-chain run at alpha and a limit-chain run driven by common random
/// numbers; each side alone has its exact law.
CoupledRun coupled_run(double alpha, const ScalingParams& p, std::uint64_t seed);

struct ConvergenceConfig {
    std::vector<double> alphas{10.0, 100.0, 1000.0};
    ScalingParams params;
    std::size_t runs = 500;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool coupled = true;  // false: independent direct runs vs branching runs
};

struct ConvergenceRow {
    double alpha = 0.0;
    std::string statistic;
    int coordinate = 0;
    double value = 0.0;
};

/// Per alpha: ks_T (per i), energy_Z (per i), median_norm_Z0, mean_norm_Z0,
/// norm_mean_Z0, testfn (per i), halt_rate, subcritical_rate.
std::vector<ConvergenceRow> convergence_experiment(const ConvergenceConfig& cfg);

/// Looks up one value of the table; throws when absent.
double table_value(std::span<const ConvergenceRow> rows, double alpha, const std::string& statistic,
                   int coordinate);

void write_kernel_csv(const KernelEstimate& k, std::ostream& out);
void write_convergence_csv(std::span<const ConvergenceRow> rows, std::ostream& out);

}  // namespace rggfpp
