#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "voxguide/metrics.hpp"
#include "voxguide/simulate.hpp"

namespace voxguide {

struct PerSessionMetrics {
    double initial_dice = 0.0;
    double final_dice = 0.0;
    int improving_clicks = 0;
    int clicks = 0;
    double gt_overlap = -1.0;  // -1 = session had no guidance
    bool early_stop = false;
};

/// The five-metric evaluation of a batch of sessions.
struct MetricsReport {
    double final_dice = 0.0;              // mean Dice after all clicks
    double initial_dice = 0.0;            // mean Dice before any click
    double efficiency = 1.0;              // 1 - mean guidance time (clamped)
    double consistent_improvement = 0.0;  // share of clicks that raise Dice
    double gt_overlap = 0.0;              // guidance precision vs ground truth
    int n_sessions = 0;
    std::vector<PerSessionMetrics> per_session;
};

/// Ratio of clicks that strictly improve the Dice score to the total click
/// budget: |improving| / (n_clicks * #sessions). Early-stopped sessions
/// still divide by their full click budget.
inline double consistent_improvement(const std::vector<SessionTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("consistent_improvement: no traces");
    std::int64_t improving = 0, budget = 0;
    for (const SessionTrace& t : traces) {
        for (std::size_t i = 0; i + 1 < t.dice_trajectory.size(); ++i)
            if (t.dice_trajectory[i + 1] > t.dice_trajectory[i]) ++improving;
        budget += t.config.n_clicks;
    }
    return static_cast<double>(improving) / static_cast<double>(budget);
}

/// Aggregate the five metrics over session traces. The guidance-overlap
/// metric averages the per-session values recorded on each final foreground
/// guidance; sessions without clicks do not contribute to it.
inline MetricsReport aggregate(const std::vector<SessionTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
    MetricsReport r;
    r.n_sessions = static_cast<int>(traces.size());
    std::vector<double> timings;
    double overlap_sum = 0.0;
    int overlap_n = 0;
    for (const SessionTrace& t : traces) {
        PerSessionMetrics m;
        m.initial_dice = t.dice_trajectory.front();
        m.final_dice = t.dice_trajectory.back();
        m.clicks = static_cast<int>(t.clicks.size());
        for (std::size_t i = 0; i + 1 < t.dice_trajectory.size(); ++i)
            if (t.dice_trajectory[i + 1] > t.dice_trajectory[i]) ++m.improving_clicks;
        m.gt_overlap = t.gt_overlap;
        m.early_stop = t.early_stop;
        r.per_session.push_back(m);

        r.initial_dice += m.initial_dice;
        r.final_dice += m.final_dice;
        timings.insert(timings.end(), t.guidance_timings.begin(), t.guidance_timings.end());
        if (t.gt_overlap >= 0.0) {
            overlap_sum += t.gt_overlap;
            ++overlap_n;
        }
    }
    r.initial_dice /= r.n_sessions;
    r.final_dice /= r.n_sessions;
    r.consistent_improvement = consistent_improvement(traces);
    // no clicks anywhere: no guidance was computed, so no time was spent
    r.efficiency = timings.empty() ? 1.0 : efficiency(timings);
    r.gt_overlap = overlap_n > 0 ? overlap_sum / overlap_n : 0.0;
    return r;
}

/// Variant that recomputes guidance overlap from explicit final guidances
/// and ground truths (parallel arrays over sessions).
inline MetricsReport aggregate(const std::vector<SessionTrace>& traces,
                               const std::vector<GuidanceVolume>& final_fg_guidances,
                               const std::vector<Mask>& ground_truths, float binarize_eps) {
    if (final_fg_guidances.size() != traces.size() || ground_truths.size() != traces.size())
        throw std::invalid_argument("aggregate: collection sizes mismatch");
    MetricsReport r = aggregate(traces);
    double overlap_sum = 0.0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const double o = gt_overlap(final_fg_guidances[i], ground_truths[i], binarize_eps);
        r.per_session[i].gt_overlap = o;
        overlap_sum += o;
    }
    r.gt_overlap = overlap_sum / static_cast<double>(traces.size());
    return r;
}

inline nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["final_dice"] = r.final_dice;
    j["initial_dice"] = r.initial_dice;
    j["efficiency"] = r.efficiency;
    j["consistent_improvement"] = r.consistent_improvement;
    j["gt_overlap"] = r.gt_overlap;
    j["n_sessions"] = r.n_sessions;
    nlohmann::json per = nlohmann::json::array();
    for (const PerSessionMetrics& m : r.per_session) {
        per.push_back({{"initial_dice", m.initial_dice},
                       {"final_dice", m.final_dice},
                       {"improving_clicks", m.improving_clicks},
                       {"clicks", m.clicks},
                       {"gt_overlap", m.gt_overlap >= 0.0 ? nlohmann::json(m.gt_overlap)
                                                          : nlohmann::json(nullptr)},
                       {"early_stop", m.early_stop}});
    }
    j["per_session"] = std::move(per);
    return j;
}

namespace detail {

inline std::string fmt_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string fmt_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

inline std::string metrics_csv_header() { return "kind,sigma,theta,p,M1,M2,M3,M4,M5"; }

/// One CSV row: kind, sigma, theta, p (percent), then the five metrics.
/// Non-applicable parameters print as "-".
inline std::string metrics_csv_row(const MetricsReport& r, const std::string& kind,
                                   const std::string& sigma, const std::string& theta,
                                   const std::string& p) {
    return kind + "," + sigma + "," + theta + "," + p + "," + detail::fmt_metric(r.final_dice) +
           "," + detail::fmt_metric(r.initial_dice) + "," + detail::fmt_metric(r.efficiency) +
           "," + detail::fmt_metric(r.consistent_improvement) + "," +
           detail::fmt_metric(r.gt_overlap);
}

}  // namespace voxguide
