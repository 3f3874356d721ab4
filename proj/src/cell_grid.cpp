#include "rggfpp/cell_grid.hpp"

#include <algorithm>
#include <cmath>

#include "rggfpp/errors.hpp"

namespace rggfpp {

CellGrid::CellGrid(const PointSet& ps, double cell_side,
                   std::optional<std::span<const std::uint32_t>> subset)
    : ps_(&ps), side_(cell_side) {
    if (!(cell_side > 0.0)) throw ParameterError("cell side must be positive");
    const int d = ps.dim();
    lo_.resize(d);
    dims_.resize(d);
    std::size_t ncells = 1;
    for (int a = 0; a < d; ++a) {
        lo_[a] = ps.box().lower(a);
        dims_[a] = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(2.0 * ps.box().half_width / side_)));
        ncells *= static_cast<std::size_t>(dims_[a]);
    }
    std::vector<std::uint32_t> all;
    std::span<const std::uint32_t> members;
    if (subset) {
        members = *subset;
    } else {
        all.resize(ps.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
        members = all;
    }
    std::vector<std::size_t> cell(members.size());
    start_.assign(ncells + 1, 0);
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto c = cell_of(ps.point(members[k]));
        cell[k] = linear(c);
        ++start_[cell[k] + 1];
    }
    for (std::size_t i = 0; i < ncells; ++i) start_[i + 1] += start_[i];
    items_.resize(members.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t k = 0; k < members.size(); ++k) items_[fill[cell[k]]++] = members[k];
}

std::vector<std::int64_t> CellGrid::cell_of(std::span<const double> x) const {
    const int d = static_cast<int>(dims_.size());
    std::vector<std::int64_t> c(d);
    for (int a = 0; a < d; ++a) {
        const auto k = static_cast<std::int64_t>(std::floor((x[a] - lo_[a]) / side_));
        c[a] = std::clamp<std::int64_t>(k, 0, dims_[a] - 1);
    }
    return c;
}

std::size_t CellGrid::linear(std::span<const std::int64_t> c) const {
    std::size_t idx = 0;
    for (std::size_t a = c.size(); a-- > 0;) idx = idx * static_cast<std::size_t>(dims_[a]) + static_cast<std::size_t>(c[a]);
    return idx;
}

std::optional<std::uint32_t> CellGrid::nearest(std::span<const double> x) const {
    if (items_.empty()) return std::nullopt;
    const int d = static_cast<int>(dims_.size());
    const auto c = cell_of(x);
    std::optional<std::uint32_t> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    auto consider = [&](std::uint32_t item) {
        const auto p = ps_->point(item);
        const double d2 = squared_distance(p, x);
        if (d2 < best_d2 || (d2 == best_d2 && lex_less(p, ps_->point(*best)))) {
            best_d2 = d2;
            best = item;
        }
    };
    std::vector<std::int64_t> cur(d), lo(d), hi(d);
    for (std::int64_t k = 0;; ++k) {
        // Visit the cells on the shell at Chebyshev distance k.
        bool any = false;
        for (int a = 0; a < d; ++a) {
            lo[a] = std::max<std::int64_t>(0, c[a] - k);
            hi[a] = std::min<std::int64_t>(dims_[a] - 1, c[a] + k);
            cur[a] = lo[a];
        }
        while (true) {
            bool on_shell = false;
            for (int a = 0; a < d; ++a) on_shell |= (std::llabs(cur[a] - c[a]) == k);
            if (on_shell) {
                any = true;
                for (std::uint32_t item : cell_items(linear(cur))) consider(item);
            }
            int a = 0;
            while (a < d && cur[a] == hi[a]) {
                cur[a] = lo[a];
                ++a;
            }
            if (a == d) break;
            ++cur[a];
        }
        // Any item outside the visited block is at least `bound` away.
        double bound = std::numeric_limits<double>::infinity();
        bool query_inside = true;
        for (int a = 0; a < d; ++a) {
            const double block_lo = lo_[a] + static_cast<double>(c[a] - k) * side_;
            const double block_hi = lo_[a] + static_cast<double>(c[a] + k + 1) * side_;
            if (x[a] < block_lo || x[a] > block_hi) query_inside = false;
            if (c[a] - k > 0) bound = std::min(bound, x[a] - block_lo);
            if (c[a] + k < dims_[a] - 1) bound = std::min(bound, block_hi - x[a]);
        }
        if (std::isinf(bound)) break;  // whole grid visited
        if (!any && !query_inside) continue;
        if (query_inside && best && best_d2 < bound * bound) break;
    }
    return best;
}

}  // namespace rggfpp
