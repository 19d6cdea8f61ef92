#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "voxguide/oracle.hpp"
#include "voxguide/phantom.hpp"
#include "voxguide/simulate.hpp"

using namespace voxguide;

namespace {

// brute-force deepest voxel of an error mask: max distance to any voxel
// outside it, ties to the smallest linear index
std::array<int, 3> brute_error_center(const Mask& err) {
    const Dims d = err.dims;
    const std::int64_t n = voxel_count(d);
    std::vector<std::array<int, 3>> inside, outside;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto v = unravel_index(d, i);
        (err.data[i] ? inside : outside).push_back(v);
    }
    double best = -1.0;
    std::array<int, 3> arg{0, 0, 0};
    for (const auto& v : inside) {
        double depth = std::numeric_limits<double>::infinity();
        for (const auto& w : outside) {
            const double dx = v[0] - w[0], dy = v[1] - w[1], dz = v[2] - w[2];
            depth = std::min(depth, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        if (depth > best) {
            best = depth;
            arg = v;
        }
    }
    return arg;
}

OracleParams small_phantom_oracle() {
    OracleParams p;
    p.tau = 12.0f;  // suits the radius-5..10 test phantoms
    return p;
}

}  // namespace

TEST_CASE("error-center click lands at the deepest error voxel") {
    const Dims dims{16, 16, 16};
    const Phantom p = make_phantom(PhantomKind::Sphere, dims, {1, 1, 1}, 0);
    const Mask empty = make_mask(dims);

    Rng rng(1);
    const Click c = sample_click(empty, p.mask, ClickPlacement::ErrorCenter, rng);
    CHECK(c.polarity == Polarity::Foreground);
    CHECK(c.pos == brute_error_center(p.mask));
    CHECK(c.pos == std::array<int, 3>{8, 8, 8});  // ball center
}

TEST_CASE("sample_click picks the larger error map and its largest component") {
    const Dims dims{12, 12, 12};
    const Phantom p = make_phantom(PhantomKind::Sphere, dims, {1, 1, 1}, 0);

    SECTION("perfect prediction is an error") {
        Rng rng(2);
        CHECK_THROWS_AS(sample_click(p.mask, p.mask, ClickPlacement::ErrorCenter, rng),
                        std::invalid_argument);
    }

    SECTION("one spurious voxel yields a background click there") {
        Mask pred = p.mask;
        pred.at(1, 1, 1) = 1;
        Rng rng(3);
        const Click c = sample_click(pred, p.mask, ClickPlacement::ErrorCenter, rng);
        CHECK(c.polarity == Polarity::Background);
        CHECK(c.pos == std::array<int, 3>{1, 1, 1});
    }

    SECTION("equal error volumes break the tie toward undersegmentation") {
        Mask gt = make_mask(dims);
        gt.at(2, 2, 2) = 1;
        Mask pred = make_mask(dims);
        pred.at(9, 9, 9) = 1;
        Rng rng(4);
        const Click c = sample_click(pred, gt, ClickPlacement::ErrorCenter, rng);
        CHECK(c.polarity == Polarity::Foreground);
        CHECK(c.pos == std::array<int, 3>{2, 2, 2});
    }

    SECTION("the click always lies inside the chosen error region") {
        Rng mask_rng(5);
        Mask gt = make_mask(dims), pred = make_mask(dims);
        for (int i = 0; i < 80; ++i) {
            gt.data[mask_rng.below(static_cast<std::uint64_t>(gt.size()))] = 1;
            pred.data[mask_rng.below(static_cast<std::uint64_t>(pred.size()))] = 1;
        }
        for (auto placement : {ClickPlacement::ErrorCenter, ClickPlacement::UniformInError}) {
            Rng rng(6);
            const Click c = sample_click(pred, gt, placement, rng);
            const std::int64_t idx = linear_index(dims, c.pos[0], c.pos[1], c.pos[2]);
            if (c.polarity == Polarity::Foreground) {
                CHECK(gt.data[idx] == 1);
                CHECK(pred.data[idx] == 0);
            } else {
                CHECK(pred.data[idx] == 1);
                CHECK(gt.data[idx] == 0);
            }
        }
    }

    SECTION("uniform placement is deterministic under a fixed rng") {
        Mask pred = make_mask(dims);
        Rng a(42), b(42);
        const Click ca = sample_click(pred, p.mask, ClickPlacement::UniformInError, a);
        const Click cb = sample_click(pred, p.mask, ClickPlacement::UniformInError, b);
        CHECK(ca == cb);
    }
}

TEST_CASE("oracle seed extraction follows the guidance kind") {
    const Dims dims{12, 12, 12};
    ClickSet cs;
    cs.insert({{6, 6, 6}, Polarity::Foreground});

    const GuidanceVolume disk = encode_disk(cs, 2.0f, dims);
    // ||v||^2 <= 4: 1 center + 6 faces + 12 edge + 8 corner + 6 axis-2 = 33
    CHECK(seeds_from_guidance(disk, 1e-6f).size() == 33);

    const GuidanceVolume heat = encode_heatmap(cs, 3.0f, dims);
    CHECK(seeds_from_guidance(heat, 1e-6f).size() == 1);  // only the click is at 1

    const Volume flat = make_volume(dims, {1, 1, 1}, 0.5f);
    GuidanceConfig cfg;
    cfg.kind = GuidanceKind::ExpGdt;
    cfg.sigma = 1.0f;
    const GuidanceVolume eg = encode_distance_guidance(cs, dims, {1, 1, 1}, &flat, cfg);
    CHECK(seeds_from_guidance(eg, 1e-6f).size() == 7);  // zeros of the non-inverted form
}

TEST_CASE("geodesic oracle segments a phantom from one click") {
    const Dims dims{32, 32, 32};
    const Phantom p = make_phantom(PhantomKind::Sphere, dims, {1, 1, 1}, 0);
    ClickSet cs;
    cs.insert({{16, 16, 16}, Polarity::Foreground});
    const GuidanceVolume fg = encode_disk(cs, 1.0f, dims);

    OracleParams params = small_phantom_oracle();
    params.geodesic.gamma = 1.0f;  // weak edges still beat the empty prediction
    const Mask pred = geodesic_oracle_segment(p.image, fg, nullptr, params);
    const Mask empty = make_mask(dims);
    CHECK(dice(pred, p.mask) > dice(empty, p.mask));

    params.geodesic.gamma = 12.0f;  // strong edge weight recovers the ball exactly
    const Mask exact = geodesic_oracle_segment(p.image, fg, nullptr, params);
    CHECK(dice(exact, p.mask) == 1.0);

    CHECK_THROWS_AS(GeodesicSeedOracle(params).segment(p.image, nullptr, nullptr),
                    std::invalid_argument);
}

TEST_CASE("two-sided oracle rule splits by geodesic distance") {
    const Dims dims{9, 9, 9};
    const Volume flat = make_volume(dims, {1, 1, 1}, 0.5f);
    ClickSet fg_c, bg_c;
    fg_c.insert({{1, 4, 4}, Polarity::Foreground});
    bg_c.insert({{7, 4, 4}, Polarity::Background});
    const GuidanceVolume fg = encode_disk(fg_c, 0.0f, dims);
    const GuidanceVolume bg = encode_disk(bg_c, 0.0f, dims);
    const Mask pred = geodesic_oracle_segment(flat, fg, &bg, {});
    CHECK(pred.at(1, 4, 4) == 1);
    CHECK(pred.at(7, 4, 4) == 0);
    CHECK(pred.at(3, 4, 4) == 1);  // closer to the foreground seed
    CHECK(pred.at(6, 4, 4) == 0);
    CHECK(pred.at(4, 4, 4) == 1);  // equidistant goes to foreground (<=)
}

TEST_CASE("session without interaction records only the initial prediction") {
    const Dims dims{16, 16, 16};
    const Phantom p = make_phantom(PhantomKind::Sphere, dims, {1, 1, 1}, 0);
    SimulationConfig cfg;
    cfg.p_interaction = 0.0;
    cfg.n_clicks = 5;
    const GeodesicSeedOracle oracle(small_phantom_oracle());
    const SessionTrace t = run_session(p.image, p.mask, oracle, cfg);
    CHECK(t.clicks.size() == 0);
    CHECK(t.dice_trajectory.size() == 1);
    CHECK(t.guidance_timings.empty());
    CHECK(t.gt_overlap < 0.0);
    CHECK(t.dice_trajectory[0] == 0.0);  // empty initial prediction vs nonempty GT
}

TEST_CASE("session trajectory grows by one dice entry per click") {
    const Dims dims{24, 24, 24};
    const Phantom p = make_phantom(PhantomKind::NoisySphere, dims, {1, 1, 1}, 11);
    SimulationConfig cfg;
    cfg.n_clicks = 4;
    cfg.rng_seed = 5;
    cfg.guidance.kind = GuidanceKind::Disk;
    cfg.guidance.sigma = 1.0f;
    OracleParams op = small_phantom_oracle();
    op.geodesic.gamma = 3.0f;
    const GeodesicSeedOracle oracle(op);
    const SessionTrace t = run_session(p.image, p.mask, oracle, cfg);
    CHECK(t.dice_trajectory.size() == t.clicks.size() + 1);
    CHECK(t.guidance_timings.size() == t.clicks.size());
    if (!t.early_stop) CHECK(t.clicks.size() == 4);
    for (double d : t.dice_trajectory) CHECK((d >= 0.0 && d <= 1.0));
    for (double s : t.guidance_timings) CHECK(s >= 0.0);
    CHECK((t.gt_overlap >= 0.0 && t.gt_overlap <= 1.0));
    CHECK(t.final_prediction.dims == dims);
}

TEST_CASE("a perfect early prediction stops the session and flags it") {
    const Dims dims{32, 32, 32};
    const Phantom p = make_phantom(PhantomKind::Sphere, dims, {1, 1, 1}, 0);
    SimulationConfig cfg;
    cfg.n_clicks = 10;
    cfg.guidance.kind = GuidanceKind::Disk;
    cfg.guidance.sigma = 1.0f;
    OracleParams op = small_phantom_oracle();
    op.geodesic.gamma = 12.0f;
    const SessionTrace t = run_session(p.image, p.mask, GeodesicSeedOracle(op), cfg);
    // one center click recovers the ball exactly, the other nine are skipped
    CHECK(t.early_stop);
    CHECK(t.clicks.size() < 10);
    CHECK(t.dice_trajectory.back() == 1.0);
}

TEST_CASE("sessions with a fixed seed are fully reproducible") {
    const Dims dims{20, 20, 20};
    const Phantom p = make_phantom(PhantomKind::NoisySphere, dims, {1, 1, 1}, 3);
    SimulationConfig cfg;
    cfg.n_clicks = 3;
    cfg.rng_seed = 77;
    cfg.placement = ClickPlacement::UniformInError;
    cfg.zero_timings = true;
    cfg.guidance.kind = GuidanceKind::Heatmap;
    cfg.guidance.sigma = 2.0f;
    const GeodesicSeedOracle oracle(small_phantom_oracle());
    const SessionTrace a = run_session(p.image, p.mask, oracle, cfg);
    const SessionTrace b = run_session(p.image, p.mask, oracle, cfg);
    CHECK(trace_to_json(a).dump() == trace_to_json(b).dump());
}

TEST_CASE("p_interaction uses a single per-volume draw") {
    const Dims dims{16, 16, 16};
    const Phantom p = make_phantom(PhantomKind::Sphere, dims, {1, 1, 1}, 0);
    const GeodesicSeedOracle oracle(small_phantom_oracle());
    SimulationConfig cfg;
    cfg.n_clicks = 2;
    cfg.guidance.sigma = 1.0f;

    int with_clicks = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.rng_seed = seed;
        cfg.p_interaction = 0.5;
        const SessionTrace t = run_session(p.image, p.mask, oracle, cfg);
        CHECK((t.clicks.size() == 0 || t.clicks.size() == 2 || t.early_stop));
        with_clicks += !t.clicks.empty();
    }
    CHECK(with_clicks > 0);
    CHECK(with_clicks < 20);
}

TEST_CASE("trace json round trip") {
    const Dims dims{16, 16, 16};
    const Phantom p = make_phantom(PhantomKind::NoisySphere, dims, {1, 1, 1}, 9);
    SimulationConfig cfg;
    cfg.n_clicks = 2;
    cfg.rng_seed = 1;
    cfg.guidance.kind = GuidanceKind::Edt;
    cfg.guidance.sigma = 1.0f;
    cfg.guidance.theta_percent = 10.0f;
    const SessionTrace t = run_session(p.image, p.mask, GeodesicSeedOracle(small_phantom_oracle()),
                                       cfg);
    const SessionTrace back = trace_from_json(trace_to_json(t));
    CHECK(back.dice_trajectory == t.dice_trajectory);
    CHECK(back.guidance_timings == t.guidance_timings);
    CHECK(back.clicks.size() == t.clicks.size());
    CHECK(back.early_stop == t.early_stop);
    CHECK(back.config.guidance.kind == t.config.guidance.kind);
    CHECK(back.config.guidance.theta_percent == t.config.guidance.theta_percent);
    CHECK(trace_to_json(back).dump() == trace_to_json(t).dump());
}
