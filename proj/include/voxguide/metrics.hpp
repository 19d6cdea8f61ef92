#pragma once

#include <algorithm>
#include <vector>

#include "voxguide/core.hpp"
#include "voxguide/guidance.hpp"

namespace voxguide {

/// Dice overlap 2|A n B| / (|A| + |B|); two empty masks count as identical.
inline double dice(const Mask& a, const Mask& b) {
    if (a.dims != b.dims) throw std::invalid_argument("dice: mask dims mismatch");
    std::int64_t inter = 0, total = 0;
    const std::size_t n = a.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        inter += a.data[i] & b.data[i];
        total += a.data[i] + b.data[i];
    }
    if (total == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

/// Precision of the guidance against ground truth: |M n G| / |G| with
/// G = {v : guidance(v) > binarize_eps}.
inline double gt_overlap(const GuidanceVolume& guidance, const Mask& gt,
                         float binarize_eps = 0.0f) {
    if (guidance.dims != gt.dims) throw std::invalid_argument("gt_overlap: dims mismatch");
    std::int64_t g = 0, mg = 0;
    const std::size_t n = guidance.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (guidance.data[i] > binarize_eps) {
            ++g;
            mg += gt.data[i];
        }
    }
    if (g == 0) throw std::invalid_argument("gt_overlap: guidance binarizes to the empty set");
    return static_cast<double>(mg) / static_cast<double>(g);
}

/// Inverted guidance-computation time 1 - T, with the mean timing T clamped
/// to [0,1] seconds so the score stays in [0,1].
inline double efficiency(const std::vector<double>& timings_seconds) {
    if (timings_seconds.empty())
        throw std::invalid_argument("efficiency: empty timing list");
    double sum = 0.0;
    for (double t : timings_seconds) {
        if (t < 0.0) throw std::invalid_argument("efficiency: negative timing");
        sum += t;
    }
    const double mean = std::clamp(sum / static_cast<double>(timings_seconds.size()), 0.0, 1.0);
    return 1.0 - mean;
}

}  // namespace voxguide
