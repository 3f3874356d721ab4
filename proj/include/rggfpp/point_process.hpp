#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rggfpp/geometry.hpp"

namespace rggfpp {

/// Axis-aligned observation window center + [-L, L)^d.
struct Box {
    int dim = 2;
    double half_width = 1.0;
    Point center;

    static Box centered(int dim, double half_width);

    double volume() const;
    double lower(int axis) const { return center[axis] - half_width; }
    double upper(int axis) const { return center[axis] + half_width; }
    bool contains(std::span<const double> p) const;
    /// Same center, half-width scaled by `fraction`.
    Box shrunk(double fraction) const;
    /// Distance from p to the box boundary (0 outside).
    double distance_to_boundary(std::span<const double> p) const;
    void validate() const;

    bool operator==(const Box&) const = default;
};

/// A finite realization of a homogeneous Poisson point process in a box.
/// Coordinates are stored flat, point i occupying [i*dim, (i+1)*dim).
class PointSet {
public:
    PointSet(Box box, double intensity, std::uint64_t seed, std::vector<double> coords);

    int dim() const { return box_.dim; }
    std::size_t size() const { return coords_.size() / static_cast<std::size_t>(box_.dim); }
    bool empty() const { return coords_.empty(); }
    const Box& box() const { return box_; }
    double intensity() const { return intensity_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(box_.dim),
                static_cast<std::size_t>(box_.dim)};
    }
    std::span<const double> coords() const { return coords_; }

    bool operator==(const PointSet&) const = default;

private:
    Box box_;
    double intensity_;
    std::uint64_t seed_;
    std::vector<double> coords_;
};

/// Homogeneous PPP of the given intensity restricted to `box`: the count is
/// drawn first by Poisson inversion, then points are placed uniformly.
/// Duplicate coordinates are redrawn. Pure in (intensity, box, seed).
PointSet sample_ppp(double intensity, const Box& box, std::uint64_t seed);

/// Multiplies every coordinate (and the box) by `factor`; intensity becomes
/// intensity / factor^d.
PointSet rescale(const PointSet& ps, double factor);

/// Appends a point (Palm-style source). Returns the new set; the inserted
/// point has index ps.size().
PointSet insert_point(const PointSet& ps, std::span<const double> p);

/// Rotates all points about the origin by a d x d row-major matrix and keeps
/// those still inside the box. The result is again a PPP of the same
/// intensity on the box.
PointSet rotate(const PointSet& ps, std::span<const double> matrix);

/// Index of the point with exactly these coordinates, or -1.
std::ptrdiff_t find_point(const PointSet& ps, std::span<const double> p);

/// NDJSON: a header record {d, L, center, lambda, seed, count} followed by
/// one {"x": [...]} record per point. Doubles are written shortest
/// round-trip, so reading back is lossless.
void write_ndjson(const PointSet& ps, std::ostream& out);
std::string to_ndjson(const PointSet& ps);
PointSet read_ndjson(std::istream& in);

}  // namespace rggfpp
