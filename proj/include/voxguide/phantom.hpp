#pragma once

#include <cstdint>

#include "voxguide/core.hpp"
#include "voxguide/rng.hpp"

namespace voxguide {

enum class PhantomKind { Sphere, TwoBlobs, NoisySphere };

struct Phantom {
    Volume image;  // intensities in [0,1]
    Mask mask;     // exact ground truth
};

namespace detail {

constexpr float kPhantomInside = 0.8f;
constexpr float kPhantomOutside = 0.2f;
constexpr float kPhantomNoiseAmp = 0.1f;

inline void stamp_ball(Mask& m, const std::array<int, 3>& c, int radius) {
    const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
    const int x0 = std::max(0, c[0] - radius), x1 = std::min(m.dims[0] - 1, c[0] + radius);
    const int y0 = std::max(0, c[1] - radius), y1 = std::min(m.dims[1] - 1, c[1] + radius);
    const int z0 = std::max(0, c[2] - radius), z1 = std::min(m.dims[2] - 1, c[2] + radius);
    for (int z = z0; z <= z1; ++z)
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const std::int64_t dx = x - c[0], dy = y - c[1], dz = z - c[2];
                if (dx * dx + dy * dy + dz * dz <= r2) m.at(x, y, z) = 1;
            }
}

}  // namespace detail

/// Synthetic test volumes with exactly known ground truth.
///
/// Geometry (voxel units): Sphere/NoisySphere put a ball of radius
/// min(dims)/3 at dims/2; TwoBlobs puts balls of radius min(dims)/6 at
/// x = nx/4 and x = nx - nx/4. Object voxels get intensity 0.8, background
/// 0.2; NoisySphere adds uniform noise of amplitude 0.1 to the image only.
inline Phantom make_phantom(PhantomKind kind, const Dims& dims, const Spacing& spacing,
                            std::uint64_t rng_seed) {
    check_dims(dims);
    check_spacing(spacing);
    if (dims[0] < 8 || dims[1] < 8 || dims[2] < 8)
        throw std::invalid_argument("phantom dims must be at least 8 per axis");

    Phantom p;
    p.mask = make_mask(dims, spacing);
    const int min_dim = std::min({dims[0], dims[1], dims[2]});
    const std::array<int, 3> center = {dims[0] / 2, dims[1] / 2, dims[2] / 2};

    switch (kind) {
        case PhantomKind::Sphere:
        case PhantomKind::NoisySphere:
            detail::stamp_ball(p.mask, center, min_dim / 3);
            break;
        case PhantomKind::TwoBlobs: {
            const int r = std::max(1, min_dim / 6);
            detail::stamp_ball(p.mask, {dims[0] / 4, dims[1] / 2, dims[2] / 2}, r);
            detail::stamp_ball(p.mask, {dims[0] - dims[0] / 4, dims[1] / 2, dims[2] / 2}, r);
            break;
        }
    }

    p.image = make_volume(dims, spacing);
    const std::int64_t n = p.image.size();
    for (std::int64_t i = 0; i < n; ++i)
        p.image.data[i] = p.mask.data[i] ? detail::kPhantomInside : detail::kPhantomOutside;

    if (kind == PhantomKind::NoisySphere) {
        Rng rng(rng_seed);
        for (std::int64_t i = 0; i < n; ++i) {
            const float noise = (rng.uniform01f() * 2.0f - 1.0f) * detail::kPhantomNoiseAmp;
            p.image.data[i] = std::clamp(p.image.data[i] + noise, 0.0f, 1.0f);
        }
    }
    return p;
}

inline PhantomKind phantom_kind_from_name(const std::string& s) {
    if (s == "sphere") return PhantomKind::Sphere;
    if (s == "twoblobs") return PhantomKind::TwoBlobs;
    if (s == "noisysphere") return PhantomKind::NoisySphere;
    throw DataError("unknown phantom kind: " + s);
}

inline const char* phantom_kind_name(PhantomKind k) {
    switch (k) {
        case PhantomKind::Sphere: return "sphere";
        case PhantomKind::TwoBlobs: return "twoblobs";
        case PhantomKind::NoisySphere: return "noisysphere";
    }
    return "?";
}

}  // namespace voxguide
