#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "voxguide/core.hpp"
#include "voxguide/distance.hpp"
#include "voxguide/parallel.hpp"

namespace voxguide {

enum class GuidanceKind { Disk, Heatmap, Edt, Gdt, ExpGdt, AdaptiveHeatmap };

inline const char* guidance_kind_name(GuidanceKind k) {
    switch (k) {
        case GuidanceKind::Disk: return "disk";
        case GuidanceKind::Heatmap: return "heatmap";
        case GuidanceKind::Edt: return "edt";
        case GuidanceKind::Gdt: return "gdt";
        case GuidanceKind::ExpGdt: return "expgdt";
        case GuidanceKind::AdaptiveHeatmap: return "adaptive";
    }
    return "?";
}

inline GuidanceKind guidance_kind_from_name(const std::string& s) {
    if (s == "disk") return GuidanceKind::Disk;
    if (s == "heatmap") return GuidanceKind::Heatmap;
    if (s == "edt") return GuidanceKind::Edt;
    if (s == "gdt") return GuidanceKind::Gdt;
    if (s == "expgdt") return GuidanceKind::ExpGdt;
    if (s == "adaptive") return GuidanceKind::AdaptiveHeatmap;
    throw DataError("unknown guidance kind: " + s);
}

inline bool guidance_needs_image(GuidanceKind k) {
    return k == GuidanceKind::Gdt || k == GuidanceKind::ExpGdt ||
           k == GuidanceKind::AdaptiveHeatmap;
}

struct GuidanceConfig {
    GuidanceKind kind = GuidanceKind::Disk;
    float sigma = 1.0f;          // radius / seed dilation, voxel units
    float theta_percent = 0.0f;  // truncate the top theta% of distances; 0 = off
    float a = 13.0f;             // adaptive: maximum radius
    float b = 0.15f;             // adaptive: decay of radius with local distance
    GeodesicParams geodesic{};
    bool squared_exponent = false;  // exp(-d^2/(2s^2)) instead of exp(-d/(2s^2))
    bool invert_exp_gdt = false;
    int adaptive_neighborhood = 27;  // 27 = full 3x3x3 around the click, 9 = in-plane 3x3
};

inline void check_guidance_config(const GuidanceConfig& c) {
    if (!(c.sigma >= 0.0f)) throw std::invalid_argument("sigma must be >= 0");
    if (!(c.theta_percent >= 0.0f && c.theta_percent < 100.0f))
        throw std::invalid_argument("theta_percent must be in [0,100)");
    if (!(c.a > 0.0f)) throw std::invalid_argument("adaptive a must be > 0");
    if (!(c.b > 0.0f)) throw std::invalid_argument("adaptive b must be > 0");
    if (c.adaptive_neighborhood != 9 && c.adaptive_neighborhood != 27)
        throw std::invalid_argument("adaptive_neighborhood must be 9 or 27");
    check_geodesic_params(c.geodesic);
}

/// Volumetric click encoding, values in [0,1]. seeds_at_one records where a
/// downstream segmenter should read its seed voxels (guidance == 1, or == 0
/// for the non-inverted exponential geodesic form).
struct GuidanceVolume {
    Dims dims{0, 0, 0};
    Spacing spacing{1.0f, 1.0f, 1.0f};
    std::vector<float> data;
    GuidanceKind kind = GuidanceKind::Disk;
    std::vector<int> per_click_sigmas;  // adaptive only, in click order
    bool seeds_at_one = true;

    float at(int x, int y, int z) const { return data[linear_index(dims, x, y, z)]; }
};

namespace detail {

inline Polarity single_polarity(const ClickSet& clicks) {
    if (clicks.empty()) throw std::invalid_argument("encoder requires at least one click");
    const Polarity p = clicks[0].polarity;
    for (const Click& c : clicks)
        if (c.polarity != p)
            throw std::invalid_argument("encoders take clicks of a single polarity");
    return p;
}

inline GuidanceVolume empty_guidance(GuidanceKind kind, const Dims& dims,
                                     const Spacing& spacing) {
    check_dims(dims);
    GuidanceVolume g;
    g.dims = dims;
    g.spacing = spacing;
    g.kind = kind;
    g.data.assign(static_cast<std::size_t>(voxel_count(dims)), 0.0f);
    return g;
}

// Row-wise accumulation of min_i(weight_i * ||v - c_i||^2), voxel units.
// Shared by the heatmap forms: finishing with exp(-sqrt(m)) realizes the
// voxelwise max of exp(-w*d) because exp is monotone.
inline void min_weighted_rsq(const std::vector<Click>& clicks, const std::vector<float>& weights,
                             const Dims& dims, std::vector<float>& out) {
    const int nx = dims[0], ny = dims[1], nz = dims[2];
    parallel_for(static_cast<std::int64_t>(ny) * nz, [&](std::int64_t lb, std::int64_t le) {
        for (std::int64_t line = lb; line < le; ++line) {
            const int z = static_cast<int>(line / ny);
            const int y = static_cast<int>(line % ny);
            float* row = out.data() + line * nx;
            std::fill(row, row + nx, kInf);
            for (std::size_t i = 0; i < clicks.size(); ++i) {
                const float w = weights[i];
                if (w == kInf) continue;  // impulse click, handled by caller
                const float dy = static_cast<float>(y - clicks[i].pos[1]);
                const float dz = static_cast<float>(z - clicks[i].pos[2]);
                const float qyz = dy * dy + dz * dz;
                const int cx = clicks[i].pos[0];
                for (int x = 0; x < nx; ++x) {
                    const float dx = static_cast<float>(x - cx);
                    row[x] = std::min(row[x], (dx * dx + qyz) * w);
                }
            }
        }
    });
}

}  // namespace detail

/// Binary spheres of radius sigma (voxel units, boundary inclusive) around
/// each click; multi-click combination is voxelwise max.
inline GuidanceVolume encode_disk(const ClickSet& clicks, float sigma, const Dims& dims,
                                  const Spacing& spacing = {1.0f, 1.0f, 1.0f}) {
    detail::single_polarity(clicks);
    if (!(sigma >= 0.0f)) throw std::invalid_argument("sigma must be >= 0");
    GuidanceVolume g = detail::empty_guidance(GuidanceKind::Disk, dims, spacing);
    const auto offsets = detail::ball_offsets(sigma);
    for (const Click& c : clicks) {
        check_click_bounds(c, dims);
        for (const auto& off : offsets) {
            const int x = c.pos[0] + off[0], y = c.pos[1] + off[1], z = c.pos[2] + off[2];
            if (in_bounds(dims, x, y, z)) g.data[linear_index(dims, x, y, z)] = 1.0f;
        }
    }
    return g;
}

/// Gaussian-style heatmap exp(-||v-c||/(2 sigma^2)) per click (distance not
/// squared; squared_exponent switches to the conventional form), combined by
/// voxelwise max. sigma = 0 degenerates to a single-voxel impulse.
inline GuidanceVolume encode_heatmap(const ClickSet& clicks, float sigma, const Dims& dims,
                                     const Spacing& spacing = {1.0f, 1.0f, 1.0f},
                                     bool squared_exponent = false) {
    detail::single_polarity(clicks);
    if (!(sigma >= 0.0f)) throw std::invalid_argument("sigma must be >= 0");
    GuidanceVolume g = detail::empty_guidance(GuidanceKind::Heatmap, dims, spacing);
    for (const Click& c : clicks) check_click_bounds(c, dims);

    if (sigma == 0.0f) {
        for (const Click& c : clicks)
            g.data[linear_index(dims, c.pos[0], c.pos[1], c.pos[2])] = 1.0f;
        return g;
    }

    const float w = 1.0f / (2.0f * sigma * sigma);
    std::vector<float> weights(clicks.size(), squared_exponent ? w : w * w);
    detail::min_weighted_rsq(clicks.items(), weights, dims, g.data);
    const std::int64_t n = voxel_count(dims);
    if (squared_exponent) {
        parallel_for(n, [&](std::int64_t b, std::int64_t e) {
            for (std::int64_t i = b; i < e; ++i) g.data[i] = std::exp(-g.data[i]);
        });
    } else {
        parallel_for(n, [&](std::int64_t b, std::int64_t e) {
            for (std::int64_t i = b; i < e; ++i) g.data[i] = std::exp(-std::sqrt(g.data[i]));
        });
    }
    return g;
}

namespace detail {

/// Threshold below which the lowest (100 - theta)% of the map's values lie:
/// the k-th smallest value with k = ceil((100-theta)/100 * n).
inline float truncation_threshold(const std::vector<float>& values, float theta_percent) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    std::int64_t k = static_cast<std::int64_t>(
        std::ceil((100.0 - static_cast<double>(theta_percent)) / 100.0 * static_cast<double>(n)));
    k = std::clamp<std::int64_t>(k, 1, n);
    std::vector<float> copy = values;
    std::nth_element(copy.begin(), copy.begin() + (k - 1), copy.end());
    return copy[static_cast<std::size_t>(k - 1)];
}

}  // namespace detail

/// Distance-based guidance (EDT / GDT / exp-GDT):
///   1. seed dilation by sigma,
///   2. distance transform,
///   3. exp-GDT: 1 - exp(-d), rescaled to [0,1] (not inverted by default);
///      EDT/GDT: clamp values above the per-image truncation threshold
///      (top theta percent), normalize by the threshold, invert 1 - d.
/// Truncated voxels end up at exactly 0; seeds at exactly 1.
inline GuidanceVolume encode_distance_guidance(const ClickSet& clicks, const Dims& dims,
                                               const Spacing& spacing, const Volume* image,
                                               const GuidanceConfig& config) {
    const Polarity polarity = detail::single_polarity(clicks);
    check_guidance_config(config);
    const GuidanceKind kind = config.kind;
    if (kind != GuidanceKind::Edt && kind != GuidanceKind::Gdt && kind != GuidanceKind::ExpGdt)
        throw std::invalid_argument("encode_distance_guidance expects a distance kind");

    DistanceMap dmap;
    if (kind == GuidanceKind::Edt) {
        dmap = edt_to_balls(clicks, polarity, config.sigma, dims, spacing);
    } else {
        if (!image) throw std::invalid_argument("geodesic guidance kinds require an image");
        if (image->dims != dims) throw std::invalid_argument("image dims mismatch");
        const SeedSet seeds = dilate_seeds(clicks, polarity, config.sigma, dims);
        dmap = gdt(seeds, *image, config.geodesic);
    }

    GuidanceVolume g = detail::empty_guidance(kind, dims, spacing);
    const std::int64_t n = voxel_count(dims);

    if (kind == GuidanceKind::ExpGdt) {
        float peak = 0.0f;
        for (std::int64_t i = 0; i < n; ++i) {
            g.data[i] = 1.0f - std::exp(-dmap.data[i]);
            peak = std::max(peak, g.data[i]);
        }
        if (peak > 0.0f)
            for (std::int64_t i = 0; i < n; ++i) g.data[i] /= peak;
        if (config.invert_exp_gdt)
            for (std::int64_t i = 0; i < n; ++i) g.data[i] = 1.0f - g.data[i];
        g.seeds_at_one = config.invert_exp_gdt;
        return g;
    }

    const float t = detail::truncation_threshold(dmap.data, config.theta_percent);
    if (t > 0.0f) {
        parallel_for(n, [&](std::int64_t b, std::int64_t e) {
            for (std::int64_t i = b; i < e; ++i)
                g.data[i] = 1.0f - std::min(dmap.data[i], t) / t;
        });
    } else {
        // degenerate map: every voxel at or below the threshold is a seed
        for (std::int64_t i = 0; i < n; ++i) g.data[i] = dmap.data[i] == 0.0f ? 1.0f : 0.0f;
    }
    return g;
}

inline int adaptive_sigma_from_mean(double mean_distance, float a, float b) {
    const double s = std::floor(a * std::exp(-static_cast<double>(b) * mean_distance));
    return std::max(0, static_cast<int>(s));
}

/// Mean distance-map value over the click's neighborhood (27 = 3x3x3 or
/// 9 = in-plane 3x3, click included, clipped at bounds).
inline double adaptive_mean_distance(const Click& click, const DistanceMap& gdt_map,
                                     int neighborhood) {
    if (neighborhood != 9 && neighborhood != 27)
        throw std::invalid_argument("adaptive_neighborhood must be 9 or 27");
    check_click_bounds(click, gdt_map.dims);
    const int zlim = neighborhood == 27 ? 1 : 0;
    double sum = 0.0;
    int count = 0;
    for (int dz = -zlim; dz <= zlim; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = click.pos[0] + dx, y = click.pos[1] + dy, z = click.pos[2] + dz;
                if (!in_bounds(gdt_map.dims, x, y, z)) continue;
                sum += gdt_map.at(x, y, z);
                ++count;
            }
    return sum / count;
}

/// Click-specific heatmap radius floor(a * exp(-b * x)), where x is the mean
/// geodesic distance around the click: large in homogeneous regions, small
/// near intensity edges.
inline int adaptive_sigma(const Click& click, const DistanceMap& gdt_map, float a, float b,
                          int neighborhood = 27) {
    return adaptive_sigma_from_mean(adaptive_mean_distance(click, gdt_map, neighborhood), a, b);
}

/// Adaptive heatmaps: one geodesic transform from the undilated click set,
/// then per-click Gaussian stamps with their own radii, combined by max.
/// sigma_i = 0 degenerates to a single-voxel impulse.
inline GuidanceVolume encode_adaptive_heatmap(const ClickSet& clicks, const Volume& image,
                                              const GuidanceConfig& config) {
    const Polarity polarity = detail::single_polarity(clicks);
    check_guidance_config(config);
    for (const Click& c : clicks) check_click_bounds(c, image.dims);

    const SeedSet seeds = dilate_seeds(clicks, polarity, 0.0f, image.dims);
    const DistanceMap gmap = gdt(seeds, image, config.geodesic);

    GuidanceVolume g = detail::empty_guidance(GuidanceKind::AdaptiveHeatmap, image.dims,
                                              image.spacing);
    g.per_click_sigmas.reserve(clicks.size());
    std::vector<float> weights(clicks.size());
    for (std::size_t i = 0; i < clicks.size(); ++i) {
        const int s = adaptive_sigma(clicks[i], gmap, config.a, config.b,
                                     config.adaptive_neighborhood);
        g.per_click_sigmas.push_back(s);
        if (s == 0) {
            weights[i] = detail::kInf;  // impulse
        } else {
            const float w = 1.0f / (2.0f * static_cast<float>(s) * s);
            weights[i] = config.squared_exponent ? w : w * w;
        }
    }

    detail::min_weighted_rsq(clicks.items(), weights, image.dims, g.data);
    const std::int64_t n = voxel_count(image.dims);
    const bool squared = config.squared_exponent;
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            const float m = g.data[i];
            g.data[i] = (m == detail::kInf) ? 0.0f : std::exp(squared ? -m : -std::sqrt(m));
        }
    });
    for (std::size_t i = 0; i < clicks.size(); ++i)
        if (g.per_click_sigmas[i] == 0)
            g.data[linear_index(image.dims, clicks[i].pos[0], clicks[i].pos[1],
                                clicks[i].pos[2])] = 1.0f;
    return g;
}

/// Dispatch over all guidance kinds. image may be null for kinds that do
/// not use it (disk, heatmap, edt).
inline GuidanceVolume encode_guidance(const ClickSet& clicks, const Dims& dims,
                                      const Spacing& spacing, const Volume* image,
                                      const GuidanceConfig& config) {
    check_guidance_config(config);
    switch (config.kind) {
        case GuidanceKind::Disk:
            return encode_disk(clicks, config.sigma, dims, spacing);
        case GuidanceKind::Heatmap:
            return encode_heatmap(clicks, config.sigma, dims, spacing, config.squared_exponent);
        case GuidanceKind::Edt:
        case GuidanceKind::Gdt:
        case GuidanceKind::ExpGdt:
            return encode_distance_guidance(clicks, dims, spacing, image, config);
        case GuidanceKind::AdaptiveHeatmap:
            if (!image) throw std::invalid_argument("adaptive heatmaps require an image");
            if (image->dims != dims) throw std::invalid_argument("image dims mismatch");
            return encode_adaptive_heatmap(clicks, *image, config);
    }
    throw std::invalid_argument("unknown guidance kind");
}

inline void save_guidance(const GuidanceVolume& g, const std::string& path,
                          std::optional<float> sigma = std::nullopt,
                          std::optional<float> theta_percent = std::nullopt) {
    detail::write_file_bytes(path, g.data.data(), g.data.size() * sizeof(float));
    nlohmann::json j = detail::grid_sidecar(g.dims, g.spacing, "f32");
    j["kind"] = guidance_kind_name(g.kind);
    if (sigma) j["sigma"] = *sigma;
    if (theta_percent) j["theta_percent"] = *theta_percent;
    if (!g.per_click_sigmas.empty()) j["per_click_sigmas"] = g.per_click_sigmas;
    detail::save_sidecar(path, std::move(j));
}

inline GuidanceVolume load_guidance(const std::string& path) {
    const nlohmann::json j = detail::load_sidecar(path);
    Volume payload = load_volume(path);
    GuidanceVolume g;
    g.dims = payload.dims;
    g.spacing = payload.spacing;
    g.data = std::move(payload.data);
    g.kind = guidance_kind_from_name(j.value("kind", "disk"));
    if (j.contains("per_click_sigmas"))
        g.per_click_sigmas = j["per_click_sigmas"].get<std::vector<int>>();
    for (float f : g.data)
        if (!(f >= 0.0f && f <= 1.0f)) throw DataError("guidance values must lie in [0,1]");
    return g;
}

}  // namespace voxguide
