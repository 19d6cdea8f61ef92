#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "voxguide/distance.hpp"
#include "voxguide/io.hpp"
#include "voxguide/parallel.hpp"
#include "voxguide/phantom.hpp"
#include "voxguide/rng.hpp"

#include "oracles.hpp"

using namespace voxguide;

namespace {

Volume random_volume(const Dims& dims, std::uint64_t seed, const Spacing& spacing = {1, 1, 1}) {
    Volume v = make_volume(dims, spacing);
    Rng rng(seed);
    for (float& f : v.data) f = rng.uniform01f();
    return v;
}

SeedSet random_seeds(const Dims& dims, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::int64_t> voxels;
    while (static_cast<int>(voxels.size()) < count) {
        voxels.push_back(static_cast<std::int64_t>(rng.below(
            static_cast<std::uint64_t>(voxel_count(dims)))));
        std::sort(voxels.begin(), voxels.end());
        voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());
    }
    return seeds_from_voxels(dims, voxels);
}

std::vector<std::array<int, 3>> seed_coords(const SeedSet& s) {
    std::vector<std::array<int, 3>> out;
    for (std::int64_t v : s.voxels) out.push_back(unravel_index(s.dims, v));
    return out;
}

}  // namespace

TEST_CASE("seed dilation sizes") {
    const Dims dims{16, 16, 16};
    ClickSet cs;
    cs.insert({{8, 8, 8}, Polarity::Foreground});

    CHECK(dilate_seeds(cs, Polarity::Foreground, 0.0f, dims).size() == 1);
    // radius 1: center + 6 face neighbors; diagonals have norm sqrt(2) > 1
    CHECK(dilate_seeds(cs, Polarity::Foreground, 1.0f, dims).size() == 7);
    CHECK_THROWS_AS(dilate_seeds(cs, Polarity::Background, 1.0f, dims), std::invalid_argument);

    // enumeration oracle for a larger radius
    const auto ball = oracles::ball_voxels(dims, {8, 8, 8}, 5.0);
    CHECK(dilate_seeds(cs, Polarity::Foreground, 5.0f, dims).size() == ball.size());

    ClickSet corner;
    corner.insert({{0, 0, 0}, Polarity::Foreground});
    const SeedSet clipped = dilate_seeds(corner, Polarity::Foreground, 5.0f, dims);
    CHECK(clipped.size() < ball.size());
    CHECK(clipped.size() == oracles::ball_voxels(dims, {0, 0, 0}, 5.0).size());
}

TEST_CASE("edt single-seed closed form") {
    const Dims dims{8, 8, 4};
    SeedSet seeds = seeds_from_voxels(dims, {linear_index(dims, 1, 1, 1)});

    const DistanceMap unit = edt(seeds, {1, 1, 1});
    CHECK(unit.at(1, 1, 1) == 0.0f);
    CHECK(unit.at(4, 5, 1) == Catch::Approx(5.0).margin(1e-6));  // 3-4-5 triangle

    const DistanceMap aniso = edt(seeds, {2, 1, 1});
    CHECK(aniso.at(2, 1, 1) == Catch::Approx(2.0).margin(1e-6));

    // closed form everywhere, anisotropic spacing
    const Spacing sp{1.5f, 0.5f, 2.0f};
    const DistanceMap m = edt(seeds, sp);
    for (int z = 0; z < dims[2]; ++z)
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x) {
                const double want = oracles::point_edt({{1, 1, 1}}, {x, y, z}, sp);
                CHECK(m.at(x, y, z) == Catch::Approx(want).margin(1e-5));
            }
}

TEST_CASE("edt matches brute force on multi-seed sets") {
    const Dims dims{16, 12, 10};
    const SeedSet seeds = random_seeds(dims, 5, 42);
    const Spacing sp{1.0f, 2.0f, 0.75f};
    const DistanceMap m = edt(seeds, sp);
    const auto want = oracles::brute_edt(dims, seed_coords(seeds), sp);
    for (std::int64_t i = 0; i < voxel_count(dims); ++i)
        CHECK(m.data[i] == Catch::Approx(want[i]).margin(1e-5));
    for (std::int64_t v : seeds.voxels) CHECK(m.data[v] == 0.0f);

    CHECK_THROWS_AS(edt(SeedSet{dims, {}}, sp), std::invalid_argument);
}

TEST_CASE("edt over a dilated discrete ball matches brute force over its voxels") {
    const Dims dims{16, 16, 16};
    ClickSet cs;
    cs.insert({{8, 8, 8}, Polarity::Foreground});
    const SeedSet seeds = dilate_seeds(cs, Polarity::Foreground, 2.0f, dims);
    const DistanceMap m = edt(seeds, {1, 1, 1});
    const auto want = oracles::brute_edt(dims, seed_coords(seeds), {1, 1, 1});
    for (std::int64_t i = 0; i < voxel_count(dims); ++i)
        CHECK(m.data[i] == Catch::Approx(want[i]).margin(1e-5));
}

TEST_CASE("ball-dilated edt equals the radial offset identity") {
    const Dims dims{32, 32, 32};
    Rng rng(9);
    for (float sigma : {0.0f, 1.0f, 5.0f, 13.0f}) {
        const std::array<int, 3> c = {rng.range(0, 31), rng.range(0, 31), rng.range(0, 31)};
        ClickSet cs;
        cs.insert({c, Polarity::Foreground});
        const DistanceMap m = edt_to_balls(cs, Polarity::Foreground, sigma, dims, {1, 1, 1});
        for (int z = 0; z < dims[2]; ++z)
            for (int y = 0; y < dims[1]; ++y)
                for (int x = 0; x < dims[0]; ++x) {
                    const double want =
                        std::max(0.0, oracles::point_edt({c}, {x, y, z}, {1, 1, 1}) - sigma);
                    if (std::abs(m.at(x, y, z) - want) > 1e-5) {
                        REQUIRE(m.at(x, y, z) == Catch::Approx(want).margin(1e-5));
                    }
                }
    }
}

TEST_CASE("ball-dilated edt takes the min over clicks") {
    const Dims dims{20, 10, 10};
    ClickSet cs;
    cs.insert({{2, 5, 5}, Polarity::Foreground});
    cs.insert({{17, 3, 6}, Polarity::Foreground});
    const float sigma = 3.0f;
    const DistanceMap m = edt_to_balls(cs, Polarity::Foreground, sigma, dims, {1, 1, 1});
    for (int x = 0; x < dims[0]; ++x) {
        const double d = std::min(oracles::point_edt({{2, 5, 5}}, {x, 7, 2}, {1, 1, 1}),
                                  oracles::point_edt({{17, 3, 6}}, {x, 7, 2}, {1, 1, 1}));
        CHECK(m.at(x, 7, 2) == Catch::Approx(std::max(0.0, d - sigma)).margin(1e-5));
    }
}

TEST_CASE("dijkstra edge cost and trivial cases") {
    const Dims dims{2, 1, 1};
    Volume img = make_volume(dims, {1, 1, 1});
    img.data = {0.2f, 0.8f};
    GeodesicParams params;
    params.gamma = 1.0f;
    const SeedSet seeds = seeds_from_voxels(dims, {0});
    const DistanceMap m = dijkstra_oracle(seeds, img, params);
    CHECK(m.data[0] == 0.0f);
    CHECK(m.data[1] == Catch::Approx(std::sqrt(1.36)).margin(1e-6));

    CHECK_THROWS_AS(dijkstra_oracle(seeds_from_voxels({65, 65, 65}, {0}),
                                    make_volume({65, 65, 65}, {1, 1, 1}), params),
                    std::invalid_argument);
}

TEST_CASE("gdt fixpoint equals dijkstra on random volumes") {
    for (std::uint64_t trial = 0; trial < 4; ++trial) {
        const Dims dims{16, 16, 16};
        const Volume img = random_volume(dims, 100 + trial);
        const SeedSet seeds = random_seeds(dims, 1 + static_cast<int>(trial), 200 + trial);
        for (float gamma : {0.0f, 1.0f}) {
            GeodesicParams params;
            params.gamma = gamma;
            params.fixpoint = true;
            const DistanceMap fast = gdt(seeds, img, params);
            const DistanceMap exact = dijkstra_oracle(seeds, img, params);
            double max_err = 0.0;
            for (std::int64_t i = 0; i < voxel_count(dims); ++i)
                max_err = std::max(max_err,
                                   std::abs(static_cast<double>(fast.data[i]) - exact.data[i]));
            CHECK(max_err <= 1e-4);
        }
    }
}

TEST_CASE("gdt on a constant image is the spatial chamfer distance") {
    const Dims dims{12, 12, 12};
    const Volume flat = make_volume(dims, {1, 1, 1}, 0.5f);
    const SeedSet seeds = seeds_from_voxels(dims, {linear_index(dims, 6, 6, 6)});
    GeodesicParams params;
    params.gamma = 7.0f;  // irrelevant on constant intensities
    params.fixpoint = true;
    const DistanceMap m = gdt(seeds, flat, params);
    const DistanceMap exact = dijkstra_oracle(seeds, flat, params);
    for (std::int64_t i = 0; i < voxel_count(dims); ++i)
        CHECK(m.data[i] == Catch::Approx(exact.data[i]).margin(1e-5));

    GeodesicParams zero = params;
    zero.gamma = 0.0f;
    const DistanceMap spatial = gdt(seeds, random_volume(dims, 5), zero);
    const DistanceMap spatial2 = gdt(seeds, random_volume(dims, 6), zero);
    CHECK(spatial.data == spatial2.data);  // gamma=0 ignores the image
    for (std::int64_t i = 0; i < voxel_count(dims); ++i)
        CHECK(m.data[i] == Catch::Approx(spatial.data[i]).margin(1e-5));
}

TEST_CASE("gdt sweeps converge monotonically and respect seed supersets") {
    const Dims dims{14, 14, 14};
    const Volume img = random_volume(dims, 77);
    const SeedSet seeds = random_seeds(dims, 2, 78);

    GeodesicParams p2, p4, pfix;
    p2.passes = 2;
    p4.passes = 4;
    pfix.fixpoint = true;
    const DistanceMap m2 = gdt(seeds, img, p2);
    const DistanceMap m4 = gdt(seeds, img, p4);
    const DistanceMap mf = gdt(seeds, img, pfix);
    for (std::int64_t i = 0; i < voxel_count(dims); ++i) {
        CHECK(m4.data[i] <= m2.data[i]);
        CHECK(mf.data[i] <= m4.data[i] + 1e-6f);
    }

    // gamma > 0 dominates the pure spatial cost
    GeodesicParams pspat = pfix;
    pspat.gamma = 0.0f;
    const DistanceMap spat = gdt(seeds, img, pspat);
    GeodesicParams pg = pfix;
    pg.gamma = 2.0f;
    const DistanceMap withg = gdt(seeds, img, pg);
    for (std::int64_t i = 0; i < voxel_count(dims); ++i)
        CHECK(withg.data[i] >= spat.data[i] - 1e-5f);

    // adding a seed never increases any value
    std::vector<std::int64_t> more = seeds.voxels;
    more.push_back(linear_index(dims, 1, 12, 3));
    const DistanceMap msup = gdt(seeds_from_voxels(dims, more), img, pfix);
    for (std::int64_t i = 0; i < voxel_count(dims); ++i)
        CHECK(msup.data[i] <= mf.data[i] + 1e-6f);

    for (std::int64_t v : seeds.voxels) CHECK(mf.data[v] == 0.0f);
}

TEST_CASE("gdt agrees with dijkstra under 6-connectivity and spacing") {
    const Dims dims{10, 12, 8};
    const Volume img = random_volume(dims, 31, {2.0f, 1.0f, 1.5f});
    const SeedSet seeds = random_seeds(dims, 3, 32);
    GeodesicParams params;
    params.gamma = 0.7f;
    params.fixpoint = true;
    params.neighborhood = Connectivity::Faces6;
    const DistanceMap a = gdt(seeds, img, params);
    const DistanceMap b = dijkstra_oracle(seeds, img, params);
    for (std::int64_t i = 0; i < voxel_count(dims); ++i)
        CHECK(a.data[i] == Catch::Approx(b.data[i]).margin(1e-4));
}

TEST_CASE("distance results do not depend on the thread count") {
    const Dims dims{24, 20, 16};
    const Volume img = random_volume(dims, 55);
    const SeedSet seeds = random_seeds(dims, 4, 56);
    GeodesicParams params;

    const int saved = thread_count();
    set_thread_count(1);
    const DistanceMap g1 = gdt(seeds, img, params);
    const DistanceMap e1 = edt(seeds, img.spacing);
    set_thread_count(5);
    const DistanceMap g5 = gdt(seeds, img, params);
    const DistanceMap e5 = edt(seeds, img.spacing);
    set_thread_count(saved);

    CHECK(g1.data == g5.data);
    CHECK(e1.data == e5.data);
}

TEST_CASE("distance map save/load keeps the kind") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "voxguide_distance_tests";
    fs::create_directories(dir);
    const Dims dims{8, 8, 8};
    const DistanceMap m = edt(random_seeds(dims, 2, 11), {1, 1, 1});
    const std::string path = (dir / "d.vol").string();
    save_distance_map(m, path);
    const DistanceMap back = load_distance_map(path);
    CHECK(back.kind == DistanceKind::Euclidean);
    CHECK(back.data == m.data);
    CHECK(back.dims == m.dims);
}
