#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace rggfpp {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

    std::size_t size() const { return parent_.size(); }

    /// Compact labels 0..k-1 assigned in order of each component's smallest
    /// member, so label order equals order of minimal vertex index.
    std::vector<std::uint32_t> labels() {
        std::vector<std::uint32_t> out(parent_.size());
        std::vector<std::uint32_t> root_label(parent_.size(), UINT32_MAX);
        std::uint32_t next = 0;
        for (std::uint32_t v = 0; v < parent_.size(); ++v) {
            const std::uint32_t r = find(v);
            if (root_label[r] == UINT32_MAX) root_label[r] = next++;
            out[v] = root_label[r];
        }
        return out;
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

}  // namespace rggfpp
