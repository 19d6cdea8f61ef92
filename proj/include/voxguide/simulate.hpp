#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "voxguide/components.hpp"
#include "voxguide/core.hpp"
#include "voxguide/distance.hpp"
#include "voxguide/guidance.hpp"
#include "voxguide/metrics.hpp"
#include "voxguide/oracle.hpp"
#include "voxguide/rng.hpp"

namespace voxguide {

enum class ClickPlacement { ErrorCenter, UniformInError };

inline const char* click_placement_name(ClickPlacement p) {
    return p == ClickPlacement::ErrorCenter ? "error_center" : "uniform_in_error";
}

inline ClickPlacement click_placement_from_name(const std::string& s) {
    if (s == "error_center") return ClickPlacement::ErrorCenter;
    if (s == "uniform_in_error") return ClickPlacement::UniformInError;
    throw DataError("unknown click placement: " + s);
}

struct SimulationConfig {
    int n_clicks = 10;
    double p_interaction = 1.0;  // chance that a volume receives clicks at all
    std::uint64_t rng_seed = 0;
    ClickPlacement placement = ClickPlacement::ErrorCenter;
    GuidanceConfig guidance{};
    bool zero_timings = false;  // record 0 instead of wall time, for byte-reproducible traces
};

inline void check_simulation_config(const SimulationConfig& c) {
    if (c.n_clicks < 1) throw std::invalid_argument("n_clicks must be >= 1");
    if (!(c.p_interaction >= 0.0 && c.p_interaction <= 1.0))
        throw std::invalid_argument("p_interaction must be in [0,1]");
    check_guidance_config(c.guidance);
}

/// Record of one simulated refinement session.
struct SessionTrace {
    ClickSet clicks;
    std::vector<double> dice_trajectory;   // length = clicks applied + 1
    std::vector<double> guidance_timings;  // seconds of encoder work per click
    Mask final_prediction;
    bool early_stop = false;
    double gt_overlap = -1.0;  // final foreground guidance vs ground truth; -1 = no guidance
    SimulationConfig config{};
};

/// Pick the next corrective click from the current error regions: the larger
/// of undersegmentation (GT minus prediction, ties win) and oversegmentation
/// decides the polarity, its largest 26-connected component receives the
/// click. ErrorCenter places it at the component voxel deepest inside the
/// component (max distance to the complement, ties to the smallest linear
/// index); UniformInError samples uniformly from the component.
inline Click sample_click(const Mask& prediction, const Mask& ground_truth,
                          ClickPlacement placement, Rng& rng) {
    if (prediction.dims != ground_truth.dims)
        throw std::invalid_argument("sample_click: dims mismatch");
    const Dims d = prediction.dims;
    const std::int64_t n = voxel_count(d);

    Mask under = make_mask(d, prediction.spacing);
    Mask over = make_mask(d, prediction.spacing);
    std::int64_t n_under = 0, n_over = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint8_t gt = ground_truth.data[i], pr = prediction.data[i];
        under.data[i] = gt & static_cast<std::uint8_t>(pr ^ 1);
        over.data[i] = pr & static_cast<std::uint8_t>(gt ^ 1);
        n_under += under.data[i];
        n_over += over.data[i];
    }
    if (n_under + n_over == 0)
        throw std::invalid_argument("prediction equals ground truth; no error to correct");

    const bool from_under = n_under >= n_over;
    const Mask& err = from_under ? under : over;
    const std::vector<Component> comps = connected_components(err, Connectivity::All26);
    const Component& comp = comps.front();

    std::int64_t chosen;
    if (placement == ClickPlacement::UniformInError) {
        chosen = comp.voxels[rng.below(comp.voxels.size())];
    } else {
        // exact Euclidean distance to the component's complement
        std::vector<std::uint8_t> in_comp(static_cast<std::size_t>(n), 0);
        for (std::int64_t v : comp.voxels) in_comp[static_cast<std::size_t>(v)] = 1;
        std::vector<std::int64_t> complement;
        complement.reserve(static_cast<std::size_t>(n - comp.size()));
        for (std::int64_t i = 0; i < n; ++i)
            if (!in_comp[static_cast<std::size_t>(i)]) complement.push_back(i);

        std::vector<float> depth;
        if (complement.empty()) {
            // component fills the volume; use the distance to the volume faces
            depth.resize(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < n; ++i) {
                const auto [x, y, z] = unravel_index(d, i);
                const float fx = std::min(x + 1, d[0] - x) * prediction.spacing[0];
                const float fy = std::min(y + 1, d[1] - y) * prediction.spacing[1];
                const float fz = std::min(z + 1, d[2] - z) * prediction.spacing[2];
                depth[static_cast<std::size_t>(i)] = std::min({fx, fy, fz});
            }
        } else {
            depth = edt(SeedSet{d, std::move(complement)}, prediction.spacing).data;
        }
        chosen = comp.voxels.front();
        float best = depth[static_cast<std::size_t>(chosen)];
        for (std::int64_t v : comp.voxels) {
            const float dv = depth[static_cast<std::size_t>(v)];
            if (dv > best) {  // strict: ties keep the smallest linear index
                best = dv;
                chosen = v;
            }
        }
    }

    const auto [x, y, z] = unravel_index(d, chosen);
    return Click{{x, y, z},
                 from_under ? Polarity::Foreground : Polarity::Background};
}

/// Simulated refinement loop: predict, record Dice, sample a corrective
/// click, re-encode both polarity guidances, predict again. The decision
/// whether the volume gets clicks at all is a single p_interaction draw.
/// Timings cover encoder work only.
inline SessionTrace run_session(const Volume& image, const Mask& ground_truth,
                                const SegmenterOracle& segmenter, const SimulationConfig& config) {
    check_simulation_config(config);
    if (image.dims != ground_truth.dims)
        throw std::invalid_argument("run_session: image/ground-truth dims mismatch");

    SessionTrace trace;
    trace.config = config;
    Rng rng(config.rng_seed);
    const bool interact = rng.uniform01() < config.p_interaction;

    Mask pred = segmenter.initial(image);
    trace.dice_trajectory.push_back(dice(pred, ground_truth));

    if (interact) {
        GuidanceVolume fg_guidance, bg_guidance;
        bool has_fg = false, has_bg = false;
        for (int k = 0; k < config.n_clicks; ++k) {
            if (pred == ground_truth) {
                trace.early_stop = true;
                break;
            }
            const Click click = sample_click(pred, ground_truth, config.placement, rng);
            if (!trace.clicks.try_insert(click)) {
                trace.early_stop = true;  // segmenter stalled on an already-clicked voxel
                break;
            }

            const auto t0 = std::chrono::steady_clock::now();
            if (trace.clicks.count(Polarity::Foreground) > 0) {
                fg_guidance = encode_guidance(trace.clicks.filtered(Polarity::Foreground),
                                              image.dims, image.spacing, &image, config.guidance);
                has_fg = true;
            }
            if (trace.clicks.count(Polarity::Background) > 0) {
                bg_guidance = encode_guidance(trace.clicks.filtered(Polarity::Background),
                                              image.dims, image.spacing, &image, config.guidance);
                has_bg = true;
            }
            const auto t1 = std::chrono::steady_clock::now();
            trace.guidance_timings.push_back(
                config.zero_timings ? 0.0 : std::chrono::duration<double>(t1 - t0).count());

            pred = segmenter.segment(image, has_fg ? &fg_guidance : nullptr,
                                     has_bg ? &bg_guidance : nullptr);
            trace.dice_trajectory.push_back(dice(pred, ground_truth));
        }
        if (has_fg) trace.gt_overlap = gt_overlap(fg_guidance, ground_truth, 0.0f);
    }

    trace.final_prediction = std::move(pred);
    return trace;
}

// --- trace (de)serialization ---

inline nlohmann::json guidance_config_to_json(const GuidanceConfig& g) {
    nlohmann::json j;
    j["kind"] = guidance_kind_name(g.kind);
    j["sigma"] = g.sigma;
    j["theta_percent"] = g.theta_percent;
    j["a"] = g.a;
    j["b"] = g.b;
    j["squared_exponent"] = g.squared_exponent;
    j["invert_exp_gdt"] = g.invert_exp_gdt;
    j["adaptive_neighborhood"] = g.adaptive_neighborhood;
    j["geodesic"] = {{"gamma", g.geodesic.gamma},
                     {"passes", g.geodesic.passes},
                     {"fixpoint", g.geodesic.fixpoint},
                     {"neighborhood", static_cast<int>(g.geodesic.neighborhood)}};
    return j;
}

inline GuidanceConfig guidance_config_from_json(const nlohmann::json& j) {
    GuidanceConfig g;
    g.kind = guidance_kind_from_name(j.at("kind").get<std::string>());
    g.sigma = j.value("sigma", 1.0f);
    g.theta_percent = j.value("theta_percent", 0.0f);
    g.a = j.value("a", 13.0f);
    g.b = j.value("b", 0.15f);
    g.squared_exponent = j.value("squared_exponent", false);
    g.invert_exp_gdt = j.value("invert_exp_gdt", false);
    g.adaptive_neighborhood = j.value("adaptive_neighborhood", 27);
    if (j.contains("geodesic")) {
        const auto& jg = j["geodesic"];
        g.geodesic.gamma = jg.value("gamma", 1.0f);
        g.geodesic.passes = jg.value("passes", 4);
        g.geodesic.fixpoint = jg.value("fixpoint", false);
        g.geodesic.neighborhood =
            jg.value("neighborhood", 26) == 6 ? Connectivity::Faces6 : Connectivity::All26;
    }
    return g;
}

inline nlohmann::json trace_to_json(const SessionTrace& t) {
    nlohmann::json j;
    nlohmann::json clicks = nlohmann::json::array();
    int order = 0;
    for (const Click& c : t.clicks) {
        clicks.push_back({{"pos", {c.pos[0], c.pos[1], c.pos[2]}},
                          {"polarity", polarity_name(c.polarity)},
                          {"order", order++}});
    }
    j["clicks"] = std::move(clicks);
    j["dice_trajectory"] = t.dice_trajectory;
    j["guidance_timings_seconds"] = t.guidance_timings;
    j["early_stop"] = t.early_stop;
    if (t.gt_overlap >= 0.0)
        j["gt_overlap"] = t.gt_overlap;
    else
        j["gt_overlap"] = nullptr;
    nlohmann::json jc;
    jc["n_clicks"] = t.config.n_clicks;
    jc["p_interaction"] = t.config.p_interaction;
    jc["rng_seed"] = t.config.rng_seed;
    jc["click_placement"] = click_placement_name(t.config.placement);
    jc["zero_timings"] = t.config.zero_timings;
    jc["guidance"] = guidance_config_to_json(t.config.guidance);
    j["config"] = std::move(jc);
    return j;
}

inline SessionTrace trace_from_json(const nlohmann::json& j) {
    SessionTrace t;
    try {
        for (const auto& jc : j.at("clicks")) {
            Click c;
            const auto& p = jc.at("pos");
            c.pos = {p[0].get<int>(), p[1].get<int>(), p[2].get<int>()};
            c.polarity = polarity_from_name(jc.at("polarity").get<std::string>());
            t.clicks.insert(c);
        }
        t.dice_trajectory = j.at("dice_trajectory").get<std::vector<double>>();
        t.guidance_timings = j.at("guidance_timings_seconds").get<std::vector<double>>();
        t.early_stop = j.at("early_stop").get<bool>();
        if (j.contains("gt_overlap") && !j["gt_overlap"].is_null())
            t.gt_overlap = j["gt_overlap"].get<double>();
        const auto& jc = j.at("config");
        t.config.n_clicks = jc.at("n_clicks").get<int>();
        t.config.p_interaction = jc.at("p_interaction").get<double>();
        t.config.rng_seed = jc.at("rng_seed").get<std::uint64_t>();
        t.config.placement = click_placement_from_name(jc.at("click_placement").get<std::string>());
        t.config.zero_timings = jc.value("zero_timings", false);
        t.config.guidance = guidance_config_from_json(jc.at("guidance"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed session trace: ") + e.what());
    }
    if (t.dice_trajectory.size() != t.clicks.size() + 1)
        throw DataError("session trace: dice_trajectory length must be clicks + 1");
    return t;
}

inline void save_trace(const SessionTrace& t, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write trace file: " + path);
    out << trace_to_json(t).dump(2) << '\n';
}

inline SessionTrace load_trace(const std::string& path) {
    nlohmann::json j;
    try {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open trace file: " + path);
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt trace JSON " + path + ": " + e.what());
    }
    return trace_from_json(j);
}

}  // namespace voxguide
