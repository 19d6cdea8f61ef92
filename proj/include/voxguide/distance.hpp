#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "voxguide/core.hpp"
#include "voxguide/io.hpp"
#include "voxguide/parallel.hpp"

namespace voxguide {

/// Seed voxels for a distance transform (clicks, possibly dilated).
/// Stored as sorted unique linear indices.
struct SeedSet {
    Dims dims{0, 0, 0};
    std::vector<std::int64_t> voxels;

    bool empty() const { return voxels.empty(); }
    std::size_t size() const { return voxels.size(); }
};

enum class DistanceKind { Euclidean, Geodesic };

struct DistanceMap {
    Dims dims{0, 0, 0};
    Spacing spacing{1.0f, 1.0f, 1.0f};
    std::vector<float> data;
    DistanceKind kind = DistanceKind::Euclidean;

    float at(int x, int y, int z) const { return data[linear_index(dims, x, y, z)]; }
};

struct GeodesicParams {
    float gamma = 1.0f;  // weight on intensity differences along the path
    int passes = 4;      // raster sweeps; even counts alternate forward/backward pairs
    bool fixpoint = false;  // sweep until no value changes (exact shortest paths)
    Connectivity neighborhood = Connectivity::All26;
};

inline void check_geodesic_params(const GeodesicParams& p) {
    if (!(p.gamma >= 0.0f)) throw std::invalid_argument("gamma must be >= 0");
    if (p.passes < 1) throw std::invalid_argument("passes must be >= 1");
}

namespace detail {

inline SeedSet finalize_seeds(const Dims& dims, std::vector<std::int64_t> voxels) {
    std::sort(voxels.begin(), voxels.end());
    voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());
    return SeedSet{dims, std::move(voxels)};
}

/// Offsets with ||delta||_2 <= sigma in voxel units, boundary inclusive.
inline std::vector<std::array<int, 3>> ball_offsets(float sigma) {
    const int r = static_cast<int>(std::floor(sigma));
    const double s2 = static_cast<double>(sigma) * sigma;
    std::vector<std::array<int, 3>> out;
    for (int dz = -r; dz <= r; ++dz)
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx)
                if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy +
                        static_cast<double>(dz) * dz <=
                    s2)
                    out.push_back({dx, dy, dz});
    return out;
}

}  // namespace detail

inline SeedSet seeds_from_voxels(const Dims& dims, std::vector<std::int64_t> voxels) {
    check_dims(dims);
    const std::int64_t n = voxel_count(dims);
    for (std::int64_t v : voxels)
        if (v < 0 || v >= n) throw std::invalid_argument("seed voxel out of bounds");
    return detail::finalize_seeds(dims, std::move(voxels));
}

/// Seed initialization with radius-sigma dilation: the union over clicks of
/// all voxels within Euclidean distance sigma (voxel units), clipped to the
/// volume. sigma = 0 keeps just the click voxels.
inline SeedSet dilate_seeds(const ClickSet& clicks, Polarity polarity, float sigma,
                            const Dims& dims) {
    check_dims(dims);
    if (!(sigma >= 0.0f)) throw std::invalid_argument("sigma must be >= 0");
    const ClickSet subset = clicks.filtered(polarity);
    if (subset.empty())
        throw std::invalid_argument(std::string("no clicks of polarity ") +
                                    polarity_name(polarity));
    const auto offsets = detail::ball_offsets(sigma);
    std::vector<std::int64_t> voxels;
    voxels.reserve(subset.size() * offsets.size());
    for (const Click& c : subset) {
        check_click_bounds(c, dims);
        for (const auto& off : offsets) {
            const int x = c.pos[0] + off[0], y = c.pos[1] + off[1], z = c.pos[2] + off[2];
            if (in_bounds(dims, x, y, z)) voxels.push_back(linear_index(dims, x, y, z));
        }
    }
    return detail::finalize_seeds(dims, std::move(voxels));
}

namespace detail {

constexpr float kInf = std::numeric_limits<float>::infinity();

/// 1D squared-distance transform under sampled parabolas (lower envelope),
/// axis weight w2 = spacing^2. Heights may be +inf.
inline void squared_dt_1d(const float* f, int n, double w2, float* out, int* hull,
                          double* bound) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        const double fq = f[q] + w2 * q * q;
        double s = 0.0;
        while (k >= 0) {
            const int p = hull[k];
            s = (fq - (f[p] + w2 * p * p)) / (2.0 * w2 * (q - p));
            if (s > bound[k]) break;
            --k;
        }
        ++k;
        hull[k] = q;
        bound[k] = (k == 0) ? -std::numeric_limits<double>::infinity() : s;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) out[q] = kInf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (j < k && bound[j + 1] < q) ++j;
        const int p = hull[j];
        const double dq = static_cast<double>(q - p);
        out[q] = static_cast<float>(w2 * dq * dq + f[p]);
    }
}

}  // namespace detail

/// Exact multi-source Euclidean distance transform in physical units.
/// Separable: a nearest-seed scan along x, then lower-envelope passes
/// along y and z on squared distances.
inline DistanceMap edt(const SeedSet& seeds, const Spacing& spacing) {
    check_dims(seeds.dims);
    check_spacing(spacing);
    if (seeds.empty()) throw std::invalid_argument("edt requires a non-empty seed set");

    const Dims d = seeds.dims;
    const int nx = d[0], ny = d[1], nz = d[2];
    const std::int64_t n = voxel_count(d);
    std::vector<float> dsq(static_cast<std::size_t>(n), detail::kInf);
    for (std::int64_t v : seeds.voxels) dsq[static_cast<std::size_t>(v)] = 0.0f;

    // pass 1: along x, nearest seed within each line
    const double sx = spacing[0];
    parallel_for(static_cast<std::int64_t>(ny) * nz, [&](std::int64_t lb, std::int64_t le) {
        for (std::int64_t line = lb; line < le; ++line) {
            float* row = dsq.data() + line * nx;
            double run = std::numeric_limits<double>::infinity();
            for (int x = 0; x < nx; ++x) {
                run = (row[x] == 0.0f) ? 0.0 : run + sx;
                row[x] = (run == std::numeric_limits<double>::infinity())
                             ? detail::kInf
                             : static_cast<float>(run * run);
            }
            run = std::numeric_limits<double>::infinity();
            for (int x = nx - 1; x >= 0; --x) {
                run = (row[x] == 0.0f) ? 0.0 : run + sx;
                if (run != std::numeric_limits<double>::infinity()) {
                    const float cand = static_cast<float>(run * run);
                    if (cand < row[x]) row[x] = cand;
                }
            }
        }
    });

    // pass 2: along y;  pass 3: along z
    const auto envelope_pass = [&](int len, std::int64_t lines, auto line_base,
                                   std::int64_t stride, double w2) {
        parallel_for(lines, [&](std::int64_t lb, std::int64_t le) {
            std::vector<float> f(static_cast<std::size_t>(len));
            std::vector<float> out(static_cast<std::size_t>(len));
            std::vector<int> hull(static_cast<std::size_t>(len));
            std::vector<double> bound(static_cast<std::size_t>(len) + 1);
            for (std::int64_t line = lb; line < le; ++line) {
                const std::int64_t base = line_base(line);
                for (int i = 0; i < len; ++i) f[i] = dsq[base + i * stride];
                detail::squared_dt_1d(f.data(), len, w2, out.data(), hull.data(), bound.data());
                for (int i = 0; i < len; ++i) dsq[base + i * stride] = out[i];
            }
        });
    };

    envelope_pass(
        ny, static_cast<std::int64_t>(nx) * nz,
        [&](std::int64_t line) {
            const std::int64_t z = line / nx, x = line % nx;
            return x + z * static_cast<std::int64_t>(nx) * ny;
        },
        nx, static_cast<double>(spacing[1]) * spacing[1]);
    envelope_pass(
        nz, static_cast<std::int64_t>(nx) * ny, [&](std::int64_t line) { return line; },
        static_cast<std::int64_t>(nx) * ny, static_cast<double>(spacing[2]) * spacing[2]);

    DistanceMap map;
    map.dims = d;
    map.spacing = spacing;
    map.kind = DistanceKind::Euclidean;
    map.data.resize(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i)
            map.data[i] = static_cast<float>(std::sqrt(static_cast<double>(dsq[i])));
    });
    return map;
}

/// Euclidean distance to the union of radius-sigma balls around the clicks
/// of one polarity: max(0, min_i ||v - c_i|| - sigma). Point distances are
/// evaluated directly against every click (that is the definition), so the
/// result is exact. sigma is in voxel units and is scaled by the smallest
/// spacing component; for isotropic spacing this matches the continuous
/// ball geometry exactly.
inline DistanceMap edt_to_balls(const ClickSet& clicks, Polarity polarity, float sigma,
                                const Dims& dims, const Spacing& spacing) {
    check_dims(dims);
    check_spacing(spacing);
    if (!(sigma >= 0.0f)) throw std::invalid_argument("sigma must be >= 0");
    const ClickSet subset = clicks.filtered(polarity);
    if (subset.empty())
        throw std::invalid_argument(std::string("no clicks of polarity ") +
                                    polarity_name(polarity));
    for (const Click& c : subset) check_click_bounds(c, dims);

    const int nx = dims[0], ny = dims[1], nz = dims[2];
    const double sigma_phys =
        static_cast<double>(sigma) * std::min({spacing[0], spacing[1], spacing[2]});
    const float sx2 = spacing[0] * spacing[0];
    const float sy2 = spacing[1] * spacing[1];
    const float sz2 = spacing[2] * spacing[2];

    DistanceMap map;
    map.dims = dims;
    map.spacing = spacing;
    map.kind = DistanceKind::Euclidean;
    map.data.resize(static_cast<std::size_t>(voxel_count(dims)));

    parallel_for(static_cast<std::int64_t>(ny) * nz, [&](std::int64_t lb, std::int64_t le) {
        std::vector<float> best(static_cast<std::size_t>(nx));
        for (std::int64_t line = lb; line < le; ++line) {
            const int z = static_cast<int>(line / ny);
            const int y = static_cast<int>(line % ny);
            std::fill(best.begin(), best.end(), detail::kInf);
            for (const Click& c : subset) {
                const float dy = static_cast<float>(y - c.pos[1]);
                const float dz = static_cast<float>(z - c.pos[2]);
                const float qyz = dy * dy * sy2 + dz * dz * sz2;
                const int cx = c.pos[0];
                for (int x = 0; x < nx; ++x) {
                    const float dx = static_cast<float>(x - cx);
                    best[x] = std::min(best[x], dx * dx * sx2 + qyz);
                }
            }
            float* row = map.data.data() + line * nx;
            for (int x = 0; x < nx; ++x)
                row[x] = static_cast<float>(
                    std::max(0.0, std::sqrt(static_cast<double>(best[x])) - sigma_phys));
        }
    });
    return map;
}

namespace detail {

struct GdtGrid {
    const Dims dims;
    const Spacing spacing;
    const float* image;
    const float gamma2;
    std::vector<float>& dist;

    float spatial2(int dx, int dy, int dz) const {
        const float a = dx * spacing[0], b = dy * spacing[1], c = dz * spacing[2];
        return a * a + b * b + c * c;
    }
};

// Relax one row from a shifted source row; no loop-carried dependency, so
// the compiler can vectorize. Change tracking is only paid for in fixpoint
// mode.
template <bool Track>
inline bool relax_row(float* drow, const float* irow, const float* dsrc, const float* isrc,
                      int x0, int x1, int dx, float sp2, float g2) {
    if constexpr (Track) {
        bool changed = false;
        for (int x = x0; x < x1; ++x) {
            const float di = irow[x] - isrc[x + dx];
            const float cand = dsrc[x + dx] + std::sqrt(sp2 + g2 * di * di);
            if (cand < drow[x]) {
                drow[x] = cand;
                changed = true;
            }
        }
        return changed;
    } else {
        for (int x = x0; x < x1; ++x) {
            const float di = irow[x] - isrc[x + dx];
            const float cand = dsrc[x + dx] + std::sqrt(sp2 + g2 * di * di);
            drow[x] = std::min(drow[x], cand);
        }
        return false;
    }
}

template <bool Track>
inline bool gdt_sweep_z(GdtGrid& g, int dir, bool wide) {
    const int nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    const std::int64_t plane = static_cast<std::int64_t>(nx) * ny;
    std::vector<char> flags(Track ? static_cast<std::size_t>(ny) : 0, 0);
    for (int z = (dir > 0 ? 1 : nz - 2); z >= 0 && z < nz; z += dir) {
        const std::int64_t cur = z * plane, prev = (z - dir) * plane;
        parallel_for(ny, [&](std::int64_t yb, std::int64_t ye) {
            for (std::int64_t y = yb; y < ye; ++y) {
                float* drow = g.dist.data() + cur + y * nx;
                const float* irow = g.image + cur + y * nx;
                bool row_changed = false;
                const int dlim = wide ? 1 : 0;
                for (int dy = -dlim; dy <= dlim; ++dy) {
                    const std::int64_t sy = y + dy;
                    if (sy < 0 || sy >= ny) continue;
                    const float* dsrc = g.dist.data() + prev + sy * nx;
                    const float* isrc = g.image + prev + sy * nx;
                    for (int dx = -dlim; dx <= dlim; ++dx) {
                        const float sp2 = g.spatial2(dx, dy, 1);
                        row_changed |= relax_row<Track>(drow, irow, dsrc, isrc, std::max(0, -dx),
                                                        nx - std::max(0, dx), dx, sp2, g.gamma2);
                    }
                }
                if (Track && row_changed) flags[static_cast<std::size_t>(y)] = 1;
            }
        });
    }
    return Track && std::find(flags.begin(), flags.end(), 1) != flags.end();
}

template <bool Track>
inline bool gdt_sweep_y(GdtGrid& g, int dir, bool wide) {
    const int nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    const std::int64_t plane = static_cast<std::int64_t>(nx) * ny;
    std::vector<char> flags(Track ? static_cast<std::size_t>(nz) : 0, 0);
    for (int y = (dir > 0 ? 1 : ny - 2); y >= 0 && y < ny; y += dir) {
        parallel_for(nz, [&](std::int64_t zb, std::int64_t ze) {
            for (std::int64_t z = zb; z < ze; ++z) {
                const std::int64_t cur = z * plane + static_cast<std::int64_t>(y) * nx;
                const std::int64_t prev = z * plane + static_cast<std::int64_t>(y - dir) * nx;
                float* drow = g.dist.data() + cur;
                const float* irow = g.image + cur;
                const float* dsrc = g.dist.data() + prev;
                const float* isrc = g.image + prev;
                bool row_changed = false;
                const int dlim = wide ? 1 : 0;
                for (int dx = -dlim; dx <= dlim; ++dx) {
                    const float sp2 = g.spatial2(dx, 1, 0);
                    row_changed |= relax_row<Track>(drow, irow, dsrc, isrc, std::max(0, -dx),
                                                    nx - std::max(0, dx), dx, sp2, g.gamma2);
                }
                if (Track && row_changed) flags[static_cast<std::size_t>(z)] = 1;
            }
        });
    }
    return Track && std::find(flags.begin(), flags.end(), 1) != flags.end();
}

template <bool Track>
inline bool gdt_sweep_x(GdtGrid& g, int dir) {
    const int nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    const float sp2 = g.spacing[0] * g.spacing[0];
    std::vector<char> flags(Track ? static_cast<std::size_t>(ny) * nz : 0, 0);
    parallel_for(static_cast<std::int64_t>(ny) * nz, [&](std::int64_t lb, std::int64_t le) {
        for (std::int64_t line = lb; line < le; ++line) {
            float* drow = g.dist.data() + line * nx;
            const float* irow = g.image + line * nx;
            bool row_changed = false;
            const int x0 = dir > 0 ? 1 : nx - 2;
            for (int x = x0; x >= 0 && x < nx; x += dir) {
                const float di = irow[x] - irow[x - dir];
                const float cand = drow[x - dir] + std::sqrt(sp2 + g.gamma2 * di * di);
                if (cand < drow[x]) {
                    drow[x] = cand;
                    row_changed = true;
                }
            }
            if (Track && row_changed) flags[static_cast<std::size_t>(line)] = 1;
        }
    });
    return Track && std::find(flags.begin(), flags.end(), 1) != flags.end();
}

// One directional pass: plane sweeps along z, then y, then x. A forward and
// a backward pass together relax every edge of the neighborhood graph.
template <bool Track>
inline bool gdt_pass(GdtGrid& g, int dir, Connectivity nb) {
    const bool wide = (nb == Connectivity::All26);
    bool changed = false;
    changed |= gdt_sweep_z<Track>(g, dir, wide);
    changed |= gdt_sweep_y<Track>(g, dir, wide);
    changed |= gdt_sweep_x<Track>(g, dir);
    return changed;
}

inline void check_image_normalized(const Volume& image) {
    for (float f : image.data)
        if (!(f >= 0.0f && f <= 1.0f))
            throw std::invalid_argument("image intensities must be pre-normalized to [0,1]");
}

}  // namespace detail

/// Geodesic distance transform by alternating forward/backward raster
/// sweeps. Edge cost between neighbors u,w is
/// sqrt(||delta_phys||^2 + gamma^2 (I(u)-I(w))^2).
///
/// With params.fixpoint the sweeps repeat until no value changes, which
/// equals exact shortest paths on the neighborhood graph. A single forward
/// sweep cannot reach every voxel, so the first forward/backward pair is
/// always completed.
inline DistanceMap gdt(const SeedSet& seeds, const Volume& image, const GeodesicParams& params) {
    check_geodesic_params(params);
    if (seeds.empty()) throw std::invalid_argument("gdt requires a non-empty seed set");
    if (seeds.dims != image.dims) throw std::invalid_argument("seed/image dims mismatch");
    check_dims(image.dims);
    detail::check_image_normalized(image);

    DistanceMap map;
    map.dims = image.dims;
    map.spacing = image.spacing;
    map.kind = DistanceKind::Geodesic;
    map.data.assign(static_cast<std::size_t>(voxel_count(image.dims)), detail::kInf);
    for (std::int64_t v : seeds.voxels) map.data[static_cast<std::size_t>(v)] = 0.0f;

    detail::GdtGrid grid{image.dims, image.spacing, image.data.data(),
                         params.gamma * params.gamma, map.data};

    if (params.fixpoint) {
        bool changed = true;
        while (changed) {
            changed = detail::gdt_pass<true>(grid, +1, params.neighborhood);
            changed |= detail::gdt_pass<true>(grid, -1, params.neighborhood);
        }
    } else {
        for (int s = 0; s < std::max(params.passes, 2); ++s)
            detail::gdt_pass<false>(grid, (s % 2 == 0) ? +1 : -1, params.neighborhood);
    }
    return map;
}

constexpr std::int64_t kDijkstraMaxVoxels = 64 * 64 * 64;

/// Exact shortest-path distances on the identical graph and edge costs as
/// gdt(), via a priority queue. Reference implementation for testing;
/// capped at 64^3 voxels.
inline DistanceMap dijkstra_oracle(const SeedSet& seeds, const Volume& image,
                                   const GeodesicParams& params) {
    check_geodesic_params(params);
    if (seeds.empty()) throw std::invalid_argument("dijkstra requires a non-empty seed set");
    if (seeds.dims != image.dims) throw std::invalid_argument("seed/image dims mismatch");
    if (voxel_count(image.dims) > kDijkstraMaxVoxels)
        throw std::invalid_argument("dijkstra oracle is capped at 64^3 voxels");
    detail::check_image_normalized(image);

    const Dims d = image.dims;
    const std::int64_t n = voxel_count(d);
    const float g2 = params.gamma * params.gamma;
    const auto& offsets = neighbor_offsets(params.neighborhood);
    std::vector<float> sp2(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        const float a = offsets[k][0] * image.spacing[0];
        const float b = offsets[k][1] * image.spacing[1];
        const float c = offsets[k][2] * image.spacing[2];
        sp2[k] = a * a + b * b + c * c;
    }

    DistanceMap map;
    map.dims = d;
    map.spacing = image.spacing;
    map.kind = DistanceKind::Geodesic;
    map.data.assign(static_cast<std::size_t>(n), detail::kInf);

    using Entry = std::pair<float, std::int64_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (std::int64_t v : seeds.voxels) {
        map.data[static_cast<std::size_t>(v)] = 0.0f;
        queue.push({0.0f, v});
    }
    while (!queue.empty()) {
        const auto [dist, idx] = queue.top();
        queue.pop();
        if (dist > map.data[static_cast<std::size_t>(idx)]) continue;
        const auto [x, y, z] = unravel_index(d, idx);
        const float iu = image.data[static_cast<std::size_t>(idx)];
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const int nx = x + offsets[k][0], ny = y + offsets[k][1], nz = z + offsets[k][2];
            if (!in_bounds(d, nx, ny, nz)) continue;
            const std::int64_t nidx = linear_index(d, nx, ny, nz);
            const float di = image.data[static_cast<std::size_t>(nidx)] - iu;
            const float cand = dist + std::sqrt(sp2[k] + g2 * di * di);
            if (cand < map.data[static_cast<std::size_t>(nidx)]) {
                map.data[static_cast<std::size_t>(nidx)] = cand;
                queue.push({cand, nidx});
            }
        }
    }
    return map;
}

inline void save_distance_map(const DistanceMap& map, const std::string& path) {
    detail::write_file_bytes(path, map.data.data(), map.data.size() * sizeof(float));
    nlohmann::json j = detail::grid_sidecar(map.dims, map.spacing, "f32");
    j["kind"] = map.kind == DistanceKind::Euclidean ? "euclidean" : "geodesic";
    detail::save_sidecar(path, std::move(j));
}

inline DistanceMap load_distance_map(const std::string& path) {
    const nlohmann::json j = detail::load_sidecar(path);
    Volume payload = load_volume(path);  // reuses length/finiteness validation
    DistanceMap map;
    map.dims = payload.dims;
    map.spacing = payload.spacing;
    map.data = std::move(payload.data);
    const std::string kind = j.value("kind", "euclidean");
    if (kind == "euclidean")
        map.kind = DistanceKind::Euclidean;
    else if (kind == "geodesic")
        map.kind = DistanceKind::Geodesic;
    else
        throw DataError("unknown distance map kind: " + kind);
    return map;
}

}  // namespace voxguide
