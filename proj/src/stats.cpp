#include "rggfpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "rggfpp/errors.hpp"

namespace rggfpp::stats {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double median(std::span<const double> x) {
    if (x.empty()) return 0.0;
    std::vector<double> v(x.begin(), x.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (v.size() % 2 == 1) return v[mid];
    const double hi = v[mid];
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.0) {
        // Theta-function form converges fast for small x.
        const double t = -M_PI * M_PI / (8.0 * x * x);
        double s = 0.0;
        for (int k = 1; k < 50; k += 2) s += std::exp(t * k * k);
        return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / x * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {
double ks_p(double d, double ne) {
    const double en = std::sqrt(ne);
    return kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
}
}  // namespace

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ParameterError("KS needs non-empty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, ks_p(d, na * nb / (na + nb))};
}

TestResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw ParameterError("KS needs a non-empty sample");
    std::vector<double> x(xs.begin(), xs.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, ks_p(d, n)};
}

TestResult chi_square(std::span<const double> observed, std::span<const double> expected, int fitted) {
    if (observed.size() != expected.size() || observed.size() < 2) throw ParameterError("chi-square size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw ParameterError("expected counts must be positive");
        stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    }
    const double dof = static_cast<double>(observed.size()) - 1.0 - fitted;
    if (dof < 1.0) throw ParameterError("chi-square needs at least one degree of freedom");
    const boost::math::chi_squared dist(dof);
    return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

namespace {
double mean_pair_distance(std::span<const double> x, std::span<const double> y, int dim) {
    const std::size_t nx = x.size() / dim, ny = y.size() / dim;
    double s = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                const double t = x[i * dim + a] - y[j * dim + a];
                d2 += t * t;
            }
            row += std::sqrt(d2);
        }
        s += row;
    }
    return s / (static_cast<double>(nx) * static_cast<double>(ny));
}
}  // namespace

double energy_distance(std::span<const double> x, std::span<const double> y, int dim) {
    if (dim < 1 || x.empty() || y.empty() || x.size() % dim || y.size() % dim) {
        throw ParameterError("energy distance needs non-empty samples of matching dimension");
    }
    return 2.0 * mean_pair_distance(x, y, dim) - mean_pair_distance(x, x, dim) - mean_pair_distance(y, y, dim);
}

double bump(std::span<const double> x, std::span<const double> center, double width) {
    double q2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double t = (x[a] - center[a]) / width;
        q2 += t * t;
    }
    if (q2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - q2));
}

double bump(double x, double center, double width) {
    const double v[1] = {x}, c[1] = {center};
    return bump(v, c, width);
}

}  // namespace rggfpp::stats
