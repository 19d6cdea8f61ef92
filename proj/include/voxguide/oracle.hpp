#pragma once

#include "voxguide/core.hpp"
#include "voxguide/distance.hpp"
#include "voxguide/guidance.hpp"

namespace voxguide {

struct OracleParams {
    GeodesicParams geodesic{12.0f, 4, false, Connectivity::All26};
    float tau = 24.0f;       // foreground acceptance threshold when no background seeds exist
    float seed_eps = 1e-6f;  // tolerance when binarizing guidance back into seed voxels
};

/// Recover the seed voxels a guidance volume encodes: the voxels at the
/// guidance extreme (1 for most kinds, 0 for the non-inverted exp-GDT form).
inline SeedSet seeds_from_guidance(const GuidanceVolume& g, float eps) {
    std::vector<std::int64_t> voxels;
    const std::int64_t n = voxel_count(g.dims);
    for (std::int64_t i = 0; i < n; ++i) {
        const bool is_seed = g.seeds_at_one ? g.data[i] >= 1.0f - eps : g.data[i] <= eps;
        if (is_seed) voxels.push_back(i);
    }
    return SeedSet{g.dims, std::move(voxels)};
}

/// Segmenter driven purely by guidance volumes, standing in for a trained
/// interactive model so refinement sessions can run end to end.
class SegmenterOracle {
  public:
    virtual ~SegmenterOracle() = default;

    /// Prediction before any click. Defaults to the empty mask.
    virtual Mask initial(const Volume& image) const {
        return make_mask(image.dims, image.spacing);
    }

    virtual Mask segment(const Volume& image, const GuidanceVolume* fg,
                         const GuidanceVolume* bg) const = 0;
};

/// Labels a voxel foreground iff its geodesic distance to the foreground
/// seeds is <= the distance to the background seeds; without background
/// seeds, iff the foreground distance is <= tau.
class GeodesicSeedOracle final : public SegmenterOracle {
  public:
    explicit GeodesicSeedOracle(OracleParams params = {}) : params_(params) {}

    Mask segment(const Volume& image, const GuidanceVolume* fg,
                 const GuidanceVolume* bg) const override {
        if (!fg) throw std::invalid_argument("oracle requires a foreground guidance");
        const SeedSet fg_seeds = seeds_from_guidance(*fg, params_.seed_eps);
        if (fg_seeds.empty()) throw std::invalid_argument("no foreground seeds in guidance");

        const DistanceMap dfg = gdt(fg_seeds, image, params_.geodesic);
        Mask out = make_mask(image.dims, image.spacing);
        const std::int64_t n = voxel_count(image.dims);

        SeedSet bg_seeds;
        if (bg) bg_seeds = seeds_from_guidance(*bg, params_.seed_eps);
        if (!bg_seeds.empty()) {
            const DistanceMap dbg = gdt(bg_seeds, image, params_.geodesic);
            for (std::int64_t i = 0; i < n; ++i)
                out.data[i] = dfg.data[i] <= dbg.data[i] ? 1 : 0;
        } else {
            for (std::int64_t i = 0; i < n; ++i)
                out.data[i] = dfg.data[i] <= params_.tau ? 1 : 0;
        }
        return out;
    }

    const OracleParams& params() const { return params_; }

  private:
    OracleParams params_;
};

inline Mask geodesic_oracle_segment(const Volume& image, const GuidanceVolume& fg,
                                    const GuidanceVolume* bg, const OracleParams& params = {}) {
    return GeodesicSeedOracle(params).segment(image, &fg, bg);
}

}  // namespace voxguide
