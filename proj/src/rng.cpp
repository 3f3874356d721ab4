#include "rggfpp/rng.hpp"

#include <cmath>
#include <limits>

#include "rggfpp/errors.hpp"

namespace rggfpp {

std::uint64_t poisson_quantile(double mean, double u) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw ParameterError("Poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        std::uint64_t k = 0;
        double p = std::exp(-mean);
        double cdf = p;
        while (u >= cdf && p > 0.0) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // Start at the mode m; F(m) is summed downward until terms vanish.
    const auto m = static_cast<std::uint64_t>(std::floor(mean));
    const double pm = std::exp(-mean + static_cast<double>(m) * std::log(mean) -
                               std::lgamma(static_cast<double>(m) + 1.0));
    double cdf_m = pm;
    {
        double p = pm;
        for (std::uint64_t k = m; k > 0; --k) {
            p *= static_cast<double>(k) / mean;
            cdf_m += p;
            if (p < cdf_m * 1e-18) break;
        }
    }
    if (u < cdf_m) {
        // Walk down: find the smallest k with F(k) > u.
        std::uint64_t k = m;
        double p = pm;
        double cdf = cdf_m;
        while (k > 0 && u < cdf - p) {
            cdf -= p;
            p *= static_cast<double>(k) / mean;
            --k;
        }
        return k;
    }
    std::uint64_t k = m;
    double p = pm;
    double cdf = cdf_m;
    while (u >= cdf) {
        ++k;
        p *= mean / static_cast<double>(k);
        if (p == 0.0) break;
        cdf += p;
    }
    return k;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw ParameterError("empty range");
    // Lemire-style rejection keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

Point Rng::in_ball(int d, double r) {
    Point c(d);
    for (double& v : c) v = uniform();
    return cube_to_ball(c, r);
}

}  // namespace rggfpp
