#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rggfpp::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance (0 for fewer than two values).
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
double median(std::span<const double> x);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic p-value (Stephens'
/// small-sample correction on the effective size).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);
TestResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);

/// Pearson chi-square against expected counts; dof = cells - 1 - fitted.
TestResult chi_square(std::span<const double> observed, std::span<const double> expected, int fitted = 0);

/// Energy distance between the empirical measures of two point samples
/// (rows of length dim, flat storage): 2E|X-Y| - E|X-X'| - E|Y-Y'| with all
/// pairs included.
double energy_distance(std::span<const double> x, std::span<const double> y, int dim);

/// Smooth compactly supported bump exp(1 - 1/(1 - q^2)) with q = |x - c| / w,
/// equal to 1 at the center and 0 for q >= 1.
double bump(std::span<const double> x, std::span<const double> center, double width);
double bump(double x, double center, double width);

}  // namespace rggfpp::stats
