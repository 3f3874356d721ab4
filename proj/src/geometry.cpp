#include "rggfpp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rggfpp/errors.hpp"

namespace rggfpp {

namespace {

// Integral of sin^m over [0, theta].
double sin_power_integral(int m, double theta) {
    if (m == 0) return theta;
    if (m == 1) return 1.0 - std::cos(theta);
    const double s = std::sin(theta);
    return -std::pow(s, m - 1) * std::cos(theta) / m +
           (static_cast<double>(m - 1) / m) * sin_power_integral(m - 2, theta);
}

// CDF on [0, pi] of the density proportional to sin^m.
double sin_power_cdf(int m, double theta) {
    return sin_power_integral(m, theta) / sin_power_integral(m, std::numbers::pi);
}

double sin_power_quantile(int m, double u) {
    if (m == 1) return std::acos(std::clamp(1.0 - 2.0 * u, -1.0, 1.0));
    double lo = 0.0;
    double hi = std::numbers::pi;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sin_power_cdf(m, mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double unit_ball_volume(int d) {
    if (d < 1) throw ParameterError("dimension must be positive");
    if (d == 2) return std::numbers::pi;
    if (d == 3) return 4.0 * std::numbers::pi / 3.0;
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

double norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Point cube_to_ball(std::span<const double> cube, double r) {
    const int d = static_cast<int>(cube.size());
    const double radius = r * std::pow(cube[0], 1.0 / d);
    Point dir(d, 0.0);
    if (d == 1) {
        dir[0] = 1.0;
    } else {
        // Angles theta_1..theta_{d-2} in [0, pi], last angle in [0, 2*pi).
        double sin_prod = 1.0;
        for (int j = 1; j <= d - 2; ++j) {
            const double theta = sin_power_quantile(d - 1 - j, cube[j]);
            dir[j - 1] = sin_prod * std::cos(theta);
            sin_prod *= std::sin(theta);
        }
        const double phi = 2.0 * std::numbers::pi * cube[d - 1];
        dir[d - 2] = sin_prod * std::cos(phi);
        dir[d - 1] = sin_prod * std::sin(phi);
    }
    for (double& v : dir) v *= radius;
    return dir;
}

Point ball_to_cube(std::span<const double> y, double r) {
    const int d = static_cast<int>(y.size());
    Point c(d, 0.0);
    const double rho = norm(y);
    c[0] = std::pow(rho / r, d);
    if (rho == 0.0 || d == 1) return c;
    // Tail norms |y_j..y_d| for the hyperspherical angles.
    std::vector<double> tail(d + 1, 0.0);
    for (int j = d - 1; j >= 0; --j) tail[j] = std::hypot(tail[j + 1], y[j]);
    for (int j = 1; j <= d - 2; ++j) {
        const double theta = std::atan2(tail[j], y[j - 1]);
        c[j] = sin_power_cdf(d - 1 - j, theta);
    }
    double phi = std::atan2(y[d - 1], y[d - 2]);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    c[d - 1] = phi / (2.0 * std::numbers::pi);
    if (c[d - 1] >= 1.0) c[d - 1] = 0.0;
    return c;
}

std::vector<Point> default_directions(int d, int count) {
    std::vector<Point> dirs;
    if (d == 2) {
        if (count < 1) throw ParameterError("direction count must be positive");
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * std::numbers::pi * k / count;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    if (d < 2) throw ParameterError("dimension must be >= 2");
    std::vector<int> digits(d, -1);
    while (true) {
        Point v(digits.begin(), digits.end());
        const double n = norm(v);
        if (n > 0.0) {
            for (double& x : v) x /= n;
            dirs.push_back(std::move(v));
        }
        int a = 0;
        while (a < d && digits[a] == 1) digits[a++] = -1;
        if (a == d) break;
        ++digits[a];
    }
    return dirs;
}

}  // namespace rggfpp
