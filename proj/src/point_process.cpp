#include "rggfpp/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rggfpp/errors.hpp"
#include "rggfpp/rng.hpp"

namespace rggfpp {

using nlohmann::json;

Box Box::centered(int dim, double half_width) {
    Box b{dim, half_width, Point(static_cast<std::size_t>(std::max(dim, 0)), 0.0)};
    b.validate();
    return b;
}

double Box::volume() const { return std::pow(2.0 * half_width, dim); }

bool Box::contains(std::span<const double> p) const {
    for (int a = 0; a < dim; ++a) {
        if (p[a] < lower(a) || p[a] >= upper(a)) return false;
    }
    return true;
}

Box Box::shrunk(double fraction) const {
    Box b = *this;
    b.half_width *= fraction;
    b.validate();
    return b;
}

double Box::distance_to_boundary(std::span<const double> p) const {
    double m = half_width;
    for (int a = 0; a < dim; ++a) {
        m = std::min({m, p[a] - lower(a), upper(a) - p[a]});
    }
    return std::max(m, 0.0);
}

void Box::validate() const {
    if (dim < 2) throw ParameterError("box dimension must be >= 2");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ParameterError("box half-width must be positive");
    if (center.size() != static_cast<std::size_t>(dim)) throw ParameterError("box center has wrong dimension");
    if (!std::isfinite(volume()) || volume() <= 0.0) throw ParameterError("box volume must be finite and positive");
}

PointSet::PointSet(Box box, double intensity, std::uint64_t seed, std::vector<double> coords)
    : box_(std::move(box)), intensity_(intensity), seed_(seed), coords_(std::move(coords)) {
    box_.validate();
    if (!(intensity_ > 0.0)) throw ParameterError("intensity must be positive");
    if (coords_.size() % static_cast<std::size_t>(box_.dim) != 0) {
        throw IntegrityError("coordinate count is not a multiple of the dimension");
    }
}

namespace {

// Indices of points that duplicate an earlier point (all but the first of each
// group of equal coordinates).
std::vector<std::size_t> duplicate_indices(std::span<const double> coords, int d) {
    const std::size_t n = coords.size() / static_cast<std::size_t>(d);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto pt = [&](std::size_t i) { return coords.subspan(i * d, d); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto pa = pt(a);
        const auto pb = pt(b);
        if (std::equal(pa.begin(), pa.end(), pb.begin())) return a < b;
        return lex_less(pa, pb);
    });
    std::vector<std::size_t> dups;
    for (std::size_t k = 1; k < n; ++k) {
        const auto pa = pt(order[k - 1]);
        const auto pb = pt(order[k]);
        if (std::equal(pa.begin(), pa.end(), pb.begin())) dups.push_back(order[k]);
    }
    std::sort(dups.begin(), dups.end());
    return dups;
}

}  // namespace

PointSet sample_ppp(double intensity, const Box& box, std::uint64_t seed) {
    if (!(intensity > 0.0) || !std::isfinite(intensity)) throw ParameterError("intensity must be positive");
    box.validate();
    Rng rng(seed);
    const std::uint64_t count = rng.poisson(intensity * box.volume());
    const int d = box.dim;
    std::vector<double> coords(count * static_cast<std::size_t>(d));
    auto draw = [&](std::size_t i) {
        for (int a = 0; a < d; ++a) {
            double x = box.lower(a) + 2.0 * box.half_width * rng.uniform();
            if (x >= box.upper(a)) x = std::nextafter(box.upper(a), box.lower(a));
            coords[i * d + a] = x;
        }
    };
    for (std::size_t i = 0; i < count; ++i) draw(i);
    for (auto dups = duplicate_indices(coords, d); !dups.empty(); dups = duplicate_indices(coords, d)) {
        for (std::size_t i : dups) draw(i);
    }
    return PointSet(box, intensity, seed, std::move(coords));
}

PointSet rescale(const PointSet& ps, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw ParameterError("rescale factor must be positive");
    Box box = ps.box();
    box.half_width *= factor;
    for (double& c : box.center) c *= factor;
    std::vector<double> coords(ps.coords().begin(), ps.coords().end());
    for (double& c : coords) c *= factor;
    return PointSet(std::move(box), ps.intensity() / std::pow(factor, ps.dim()), ps.seed(),
                    std::move(coords));
}

PointSet insert_point(const PointSet& ps, std::span<const double> p) {
    if (p.size() != static_cast<std::size_t>(ps.dim())) throw ParameterError("point has wrong dimension");
    if (!ps.box().contains(p)) throw ParameterError("inserted point lies outside the box");
    if (find_point(ps, p) >= 0) throw ParameterError("inserted point duplicates a sample point");
    std::vector<double> coords(ps.coords().begin(), ps.coords().end());
    coords.insert(coords.end(), p.begin(), p.end());
    return PointSet(ps.box(), ps.intensity(), ps.seed(), std::move(coords));
}

PointSet rotate(const PointSet& ps, std::span<const double> matrix) {
    const int d = ps.dim();
    if (matrix.size() != static_cast<std::size_t>(d * d)) throw ParameterError("rotation matrix must be d x d");
    std::vector<double> coords;
    coords.reserve(ps.coords().size());
    Point y(d);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto x = ps.point(i);
        for (int a = 0; a < d; ++a) {
            double s = 0.0;
            for (int b = 0; b < d; ++b) s += matrix[a * d + b] * x[b];
            y[a] = s;
        }
        if (ps.box().contains(y)) coords.insert(coords.end(), y.begin(), y.end());
    }
    return PointSet(ps.box(), ps.intensity(), ps.seed(), std::move(coords));
}

std::ptrdiff_t find_point(const PointSet& ps, std::span<const double> p) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto q = ps.point(i);
        if (std::equal(q.begin(), q.end(), p.begin(), p.end())) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
}

void write_ndjson(const PointSet& ps, std::ostream& out) {
    json header = {{"d", ps.dim()},
                   {"L", ps.box().half_width},
                   {"center", ps.box().center},
                   {"lambda", ps.intensity()},
                   {"seed", ps.seed()},
                   {"count", ps.size()}};
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto p = ps.point(i);
        json rec = {{"x", std::vector<double>(p.begin(), p.end())}};
        out << rec.dump() << '\n';
    }
}

std::string to_ndjson(const PointSet& ps) {
    std::ostringstream os;
    write_ndjson(ps, os);
    return os.str();
}

PointSet read_ndjson(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty point-set stream");
    try {
        const json header = json::parse(line);
        const int d = header.at("d").get<int>();
        Box box{d, header.at("L").get<double>(), header.at("center").get<std::vector<double>>()};
        const auto count = header.at("count").get<std::size_t>();
        std::vector<double> coords;
        coords.reserve(count * static_cast<std::size_t>(std::max(d, 1)));
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto x = json::parse(line).at("x").get<std::vector<double>>();
            if (x.size() != static_cast<std::size_t>(d)) throw IntegrityError("point record has wrong dimension");
            coords.insert(coords.end(), x.begin(), x.end());
        }
        if (coords.size() != count * static_cast<std::size_t>(d)) {
            throw IntegrityError("point count does not match header");
        }
        return PointSet(std::move(box), header.at("lambda").get<double>(),
                        header.at("seed").get<std::uint64_t>(), std::move(coords));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed point-set NDJSON: ") + e.what());
    }
}

}  // namespace rggfpp
