#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "voxguide/evaluate.hpp"
#include "voxguide/oracle.hpp"
#include "voxguide/phantom.hpp"
#include "voxguide/simulate.hpp"

namespace voxguide {

inline bool kind_uses_sigma(GuidanceKind k) { return k != GuidanceKind::AdaptiveHeatmap; }

inline bool kind_uses_theta(GuidanceKind k) {
    return k == GuidanceKind::Edt || k == GuidanceKind::Gdt;
}

struct SweepVolume {
    std::string name;
    Volume image;
    Mask mask;
};

/// Hyperparameter grid for a batch of oracle-driven simulation runs: one
/// metrics row per legal (kind, sigma, theta, p) combination.
struct SweepSpec {
    std::vector<GuidanceKind> kinds{GuidanceKind::Disk,   GuidanceKind::Heatmap,
                                    GuidanceKind::Edt,    GuidanceKind::Gdt,
                                    GuidanceKind::ExpGdt, GuidanceKind::AdaptiveHeatmap};
    std::vector<float> sigmas{0.0f, 1.0f, 5.0f, 9.0f, 13.0f};
    std::vector<float> thetas{0.0f, 10.0f, 30.0f, 50.0f};
    std::vector<double> p_values{0.5, 0.75, 1.0};
    int n_clicks = 10;
    std::uint64_t rng_seed = 0;
    ClickPlacement placement = ClickPlacement::ErrorCenter;
    GeodesicParams geodesic{};  // guidance-side geodesic parameters
    OracleParams oracle{};
    bool zero_timings = false;
    std::vector<SweepVolume> volumes;
};

struct SweepRow {
    GuidanceKind kind = GuidanceKind::Disk;
    std::optional<float> sigma;  // empty when not applicable to the kind
    std::optional<float> theta;
    double p = 1.0;
    MetricsReport report;
};

inline void check_sweep_spec(const SweepSpec& spec) {
    if (spec.kinds.empty() || spec.sigmas.empty() || spec.thetas.empty() ||
        spec.p_values.empty())
        throw std::invalid_argument("sweep: all parameter lists must be non-empty");
    if (spec.volumes.empty()) throw std::invalid_argument("sweep: no volumes");
    if (spec.n_clicks < 1) throw std::invalid_argument("sweep: n_clicks must be >= 1");
    for (float s : spec.sigmas)
        if (!(s >= 0.0f)) throw std::invalid_argument("sweep: sigma must be >= 0");
    for (float t : spec.thetas)
        if (!(t >= 0.0f && t < 100.0f))
            throw std::invalid_argument("sweep: theta must be in [0,100)");
    for (double p : spec.p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sweep: p must be in [0,1]");
}

/// Run the grid in deterministic order (kind, sigma, theta, p). Parameters a
/// kind does not consume collapse to a single row instead of erroring; the
/// collapse is reported once per kind on `log`.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream* log = nullptr) {
    check_sweep_spec(spec);
    const std::vector<std::optional<float>> no_param{std::nullopt};

    std::vector<SweepRow> rows;
    std::uint64_t cell_index = 0;
    for (GuidanceKind kind : spec.kinds) {
        std::vector<std::optional<float>> sigmas, thetas;
        if (kind_uses_sigma(kind))
            for (float s : spec.sigmas) sigmas.emplace_back(s);
        else
            sigmas = no_param;
        if (kind_uses_theta(kind))
            for (float t : spec.thetas) thetas.emplace_back(t);
        else
            thetas = no_param;
        if (log) {
            if (!kind_uses_sigma(kind))
                *log << "sweep: sigma not applicable to " << guidance_kind_name(kind)
                     << "; collapsed\n";
            if (!kind_uses_theta(kind))
                *log << "sweep: theta not applicable to " << guidance_kind_name(kind)
                     << "; collapsed\n";
        }

        for (const auto& sigma : sigmas) {
            for (const auto& theta : thetas) {
                for (double p : spec.p_values) {
                    SweepRow row;
                    row.kind = kind;
                    row.sigma = sigma;
                    row.theta = theta;
                    row.p = p;

                    SimulationConfig cfg;
                    cfg.n_clicks = spec.n_clicks;
                    cfg.p_interaction = p;
                    cfg.placement = spec.placement;
                    cfg.zero_timings = spec.zero_timings;
                    cfg.guidance.kind = kind;
                    cfg.guidance.sigma = sigma.value_or(0.0f);
                    cfg.guidance.theta_percent = theta.value_or(0.0f);
                    cfg.guidance.geodesic = spec.geodesic;

                    const GeodesicSeedOracle oracle(spec.oracle);
                    std::vector<SessionTrace> traces;
                    traces.reserve(spec.volumes.size());
                    for (std::size_t vi = 0; vi < spec.volumes.size(); ++vi) {
                        cfg.rng_seed = mix_seed(spec.rng_seed, cell_index, vi);
                        traces.push_back(
                            run_session(spec.volumes[vi].image, spec.volumes[vi].mask, oracle, cfg));
                    }
                    row.report = aggregate(traces);
                    rows.push_back(std::move(row));
                    ++cell_index;
                }
            }
        }
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = metrics_csv_header() + "\n";
    for (const SweepRow& row : rows) {
        const std::string sigma = row.sigma ? detail::fmt_param(*row.sigma) : "-";
        const std::string theta = row.theta ? detail::fmt_param(*row.theta) : "-";
        const std::string p = detail::fmt_param(row.p * 100.0);
        out += metrics_csv_row(row.report, guidance_kind_name(row.kind), sigma, theta, p);
        out += "\n";
    }
    return out;
}

}  // namespace voxguide
