#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rggfpp {

using Point = std::vector<double>;

/// Volume of the unit ball in R^d, pi^(d/2) / Gamma(d/2 + 1).
double unit_ball_volume(int d);

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Strict lexicographic order on coordinate vectors.
bool lex_less(std::span<const double> a, std::span<const double> b);

/// Measure-preserving map from the unit cube [0,1)^d onto the ball B_r(0).
/// Coordinate 0 carries (|y|/r)^d, the rest carry hyperspherical angles
/// through their marginal CDFs, so a uniform cube point lands uniformly in
/// the ball.
Point cube_to_ball(std::span<const double> cube, double r);

/// Inverse of cube_to_ball (up to the measure-zero sphere |y| = r, where
/// coordinate 0 equals 1).
Point ball_to_cube(std::span<const double> y, double r);

/// Equally spaced unit directions: 2-d uses `count` angles 2*pi*k/count,
/// d >= 3 uses the normalized nonzero vectors of {-1,0,1}^d.
std::vector<Point> default_directions(int d, int count = 16);

}  // namespace rggfpp
