#pragma once

#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxguide/guidance.hpp"
#include "voxguide/phantom.hpp"
#include "voxguide/rng.hpp"

namespace voxguide {

struct BenchSpec {
    std::vector<int> sizes{64};
    std::vector<GuidanceKind> kinds{GuidanceKind::Disk,   GuidanceKind::Heatmap,
                                    GuidanceKind::Edt,    GuidanceKind::Gdt,
                                    GuidanceKind::ExpGdt, GuidanceKind::AdaptiveHeatmap};
    int repetitions = 5;
    int n_clicks = 10;
    std::uint64_t rng_seed = 0;
    GuidanceConfig base{};  // sigma/theta/geodesic settings shared by all kinds
};

struct BenchCell {
    GuidanceKind kind = GuidanceKind::Disk;
    int size = 0;
    double median_s = 0.0;
    double p95_s = 0.0;
    std::vector<double> samples_s;
};

namespace detail {

inline double sorted_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const std::size_t k = std::min<std::size_t>(
        n - 1, static_cast<std::size_t>(std::ceil(q * static_cast<double>(n))) - 1);
    return v[k];
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Time guidance encoding per (kind, size) on a sphere phantom with
/// n_clicks random foreground clicks, repeated `repetitions` times.
inline std::vector<BenchCell> run_bench(const BenchSpec& spec) {
    if (spec.repetitions < 1) throw std::invalid_argument("bench: repetitions must be >= 1");
    if (spec.sizes.empty() || spec.kinds.empty())
        throw std::invalid_argument("bench: sizes and kinds must be non-empty");

    std::vector<BenchCell> cells;
    for (int size : spec.sizes) {
        const Dims dims{size, size, size};
        const Phantom phantom =
            make_phantom(PhantomKind::Sphere, dims, {1.0f, 1.0f, 1.0f}, spec.rng_seed);

        Rng rng(mix_seed(spec.rng_seed, static_cast<std::uint64_t>(size)));
        ClickSet clicks;
        while (clicks.size() < static_cast<std::size_t>(spec.n_clicks)) {
            Click c;
            c.pos = {rng.range(0, size - 1), rng.range(0, size - 1), rng.range(0, size - 1)};
            c.polarity = Polarity::Foreground;
            clicks.try_insert(c);
        }

        for (GuidanceKind kind : spec.kinds) {
            BenchCell cell;
            cell.kind = kind;
            cell.size = size;
            GuidanceConfig cfg = spec.base;
            cfg.kind = kind;
            for (int rep = 0; rep < spec.repetitions; ++rep) {
                const auto t0 = std::chrono::steady_clock::now();
                const GuidanceVolume g =
                    encode_guidance(clicks, dims, phantom.image.spacing, &phantom.image, cfg);
                const auto t1 = std::chrono::steady_clock::now();
                (void)g;
                cell.samples_s.push_back(std::chrono::duration<double>(t1 - t0).count());
            }
            cell.median_s = detail::median(cell.samples_s);
            cell.p95_s = detail::sorted_quantile(cell.samples_s, 0.95);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

inline nlohmann::json bench_to_json(const std::vector<BenchCell>& cells) {
    nlohmann::json arr = nlohmann::json::array();
    for (const BenchCell& c : cells) {
        arr.push_back({{"kind", guidance_kind_name(c.kind)},
                       {"size", c.size},
                       {"median_seconds", c.median_s},
                       {"p95_seconds", c.p95_s},
                       {"samples_seconds", c.samples_s}});
    }
    return arr;
}

inline void print_bench_table(const std::vector<BenchCell>& cells, std::ostream& out) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-10s %6s %12s %12s %5s", "kind", "size", "median[s]",
                  "p95[s]", "reps");
    out << buf << "\n";
    for (const BenchCell& c : cells) {
        std::snprintf(buf, sizeof(buf), "%-10s %6d %12.4f %12.4f %5zu",
                      guidance_kind_name(c.kind), c.size, c.median_s, c.p95_s,
                      c.samples_s.size());
        out << buf << "\n";
    }
}

/// True when every cell's median stays within the budget.
inline bool bench_within_budget(const std::vector<BenchCell>& cells, double budget_seconds) {
    for (const BenchCell& c : cells)
        if (c.median_s > budget_seconds) return false;
    return true;
}

}  // namespace voxguide
