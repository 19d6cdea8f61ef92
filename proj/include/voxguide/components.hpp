#pragma once

#include <cstdint>
#include <vector>

#include "voxguide/core.hpp"

namespace voxguide {

/// One connected component of a mask, voxels as linear indices in
/// ascending order.
struct Component {
    std::vector<std::int64_t> voxels;
    std::int64_t size() const { return static_cast<std::int64_t>(voxels.size()); }
};

/// Partition the 1-voxels of a mask into connected components, sorted by
/// size descending; ties broken by the smallest linear voxel index.
inline std::vector<Component> connected_components(const Mask& mask, Connectivity conn) {
    validate_mask(mask);
    const Dims& d = mask.dims;
    const std::int64_t n = voxel_count(d);
    const auto& offsets = neighbor_offsets(conn);

    std::vector<std::uint8_t> visited(static_cast<std::size_t>(n), 0);
    std::vector<Component> comps;
    std::vector<std::int64_t> stack;

    for (std::int64_t start = 0; start < n; ++start) {
        if (!mask.data[start] || visited[start]) continue;
        Component comp;
        visited[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::int64_t idx = stack.back();
            stack.pop_back();
            comp.voxels.push_back(idx);
            const auto [x, y, z] = unravel_index(d, idx);
            for (const auto& off : offsets) {
                const int nx = x + off[0], ny = y + off[1], nz = z + off[2];
                if (!in_bounds(d, nx, ny, nz)) continue;
                const std::int64_t nidx = linear_index(d, nx, ny, nz);
                if (mask.data[nidx] && !visited[nidx]) {
                    visited[nidx] = 1;
                    stack.push_back(nidx);
                }
            }
        }
        std::sort(comp.voxels.begin(), comp.voxels.end());
        comps.push_back(std::move(comp));
    }

    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        if (a.voxels.size() != b.voxels.size()) return a.voxels.size() > b.voxels.size();
        return a.voxels.front() < b.voxels.front();
    });
    return comps;
}

}  // namespace voxguide
