#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rggfpp/point_process.hpp"

namespace rggfpp {

/// Uniform spatial hash over a box. Items are point indices bucketed by
/// cell with a counting sort; cells are addressed row-major.
class CellGrid {
public:
    /// Buckets all points of `ps`, or only `subset` when given.
    CellGrid(const PointSet& ps, double cell_side,
             std::optional<std::span<const std::uint32_t>> subset = std::nullopt);

    double cell_side() const { return side_; }
    std::size_t cell_count() const { return start_.size() - 1; }
    std::size_t item_count() const { return items_.size(); }

    std::vector<std::int64_t> cell_of(std::span<const double> x) const;

    /// Calls fn(index) for every item in cells within `reach` cells (per
    /// axis) of the cell containing x. Callers filter by distance.
    template <class Fn>
    void for_each_near(std::span<const double> x, int reach, Fn&& fn) const;

    /// Item nearest to x; ties broken by lexicographically smallest
    /// coordinates. Empty grid gives nullopt.
    std::optional<std::uint32_t> nearest(std::span<const double> x) const;

    std::span<const std::uint32_t> cell_items(std::size_t cell) const {
        return {items_.data() + start_[cell], start_[cell + 1] - start_[cell]};
    }
    const std::vector<std::int64_t>& shape() const { return dims_; }
    std::size_t linear(std::span<const std::int64_t> c) const;

private:
    const PointSet* ps_;
    double side_;
    std::vector<double> lo_;
    std::vector<std::int64_t> dims_;
    std::vector<std::size_t> start_;
    std::vector<std::uint32_t> items_;
};

template <class Fn>
void CellGrid::for_each_near(std::span<const double> x, int reach, Fn&& fn) const {
    const int d = static_cast<int>(dims_.size());
    const auto c = cell_of(x);
    std::vector<std::int64_t> lo(d), hi(d), cur(d);
    for (int a = 0; a < d; ++a) {
        lo[a] = std::max<std::int64_t>(0, c[a] - reach);
        hi[a] = std::min<std::int64_t>(dims_[a] - 1, c[a] + reach);
        cur[a] = lo[a];
    }
    while (true) {
        for (std::uint32_t item : cell_items(linear(cur))) fn(item);
        int a = 0;
        while (a < d && cur[a] == hi[a]) {
            cur[a] = lo[a];
            ++a;
        }
        if (a == d) break;
        ++cur[a];
    }
}

}  // namespace rggfpp
