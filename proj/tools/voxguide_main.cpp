// voxguide command-line tool: phantom generation, distance transforms,
// click-guidance encoding, simulated refinement sessions, metric evaluation,
// hyperparameter sweeps and timing benchmarks.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 budget-check failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voxguide/voxguide.hpp"

using namespace voxguide;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBudget = 3;

bool g_quiet = false;

void info(const std::string& msg) {
    if (!g_quiet) std::cerr << msg << "\n";
}

Dims parse_dims(const std::string& s) {
    std::stringstream ss(s);
    std::string tok;
    std::vector<int> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stoi(tok));
    if (vals.size() == 1) return {vals[0], vals[0], vals[0]};
    if (vals.size() != 3) throw UsageError("--dims expects N or NX,NY,NZ");
    return {vals[0], vals[1], vals[2]};
}

Spacing parse_spacing(const std::string& s) {
    std::stringstream ss(s);
    std::string tok;
    std::vector<float> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stof(tok));
    if (vals.size() == 1) return {vals[0], vals[0], vals[0]};
    if (vals.size() != 3) throw UsageError("--spacing expects S or SX,SY,SZ");
    return {vals[0], vals[1], vals[2]};
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write: " + path);
    out << text;
}

// --- shared option bags ---

struct GeodesicFlags {
    float gamma = 1.0f;
    int passes = 4;
    bool fixpoint = false;
    int neighborhood = 26;

    GeodesicParams params() const {
        GeodesicParams p;
        p.gamma = gamma;
        p.passes = passes;
        p.fixpoint = fixpoint;
        if (neighborhood != 6 && neighborhood != 26)
            throw UsageError("--neighborhood must be 6 or 26");
        p.neighborhood = neighborhood == 6 ? Connectivity::Faces6 : Connectivity::All26;
        return p;
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--gamma", gamma, "Intensity weight of the geodesic edge cost")
            ->capture_default_str();
        cmd->add_option("--passes", passes, "Raster sweeps (forward/backward alternating)")
            ->capture_default_str();
        cmd->add_flag("--fixpoint", fixpoint, "Sweep until convergence (exact shortest paths)");
        cmd->add_option("--neighborhood", neighborhood, "Voxel graph: 6 or 26 neighbors")
            ->capture_default_str();
    }
};

struct OracleFlags {
    float gamma = 12.0f;
    float tau = 24.0f;
    int passes = 4;

    OracleParams params() const {
        OracleParams p;
        p.geodesic.gamma = gamma;
        p.geodesic.passes = passes;
        p.tau = tau;
        return p;
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--oracle-gamma", gamma, "Intensity weight used by the segmenter oracle")
            ->capture_default_str();
        cmd->add_option("--oracle-tau", tau,
                        "Foreground distance threshold when no background clicks exist")
            ->capture_default_str();
        cmd->add_option("--oracle-passes", passes, "Raster sweeps inside the oracle")
            ->capture_default_str();
    }
};

GuidanceKind parse_kind(const std::string& s) {
    try {
        return guidance_kind_from_name(s);
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }
}

// clicks of one polarity from a clicks file
ClickSet load_clicks_for(const std::string& path, const std::string& polarity) {
    const ClickSet all = load_clicks(path);
    if (polarity.empty()) {
        bool fg = false, bg = false;
        for (const Click& c : all) (c.polarity == Polarity::Foreground ? fg : bg) = true;
        if (fg && bg)
            throw UsageError("clicks file mixes polarities; select one with --polarity");
        return all;
    }
    return all.filtered(polarity_from_name(polarity));
}

// --- subcommands ---

int cmd_phantom(const std::string& kind, const std::string& dims_s, const std::string& spacing_s,
                std::uint64_t seed, const std::string& out) {
    const Phantom p = make_phantom(phantom_kind_from_name(kind), parse_dims(dims_s),
                                   parse_spacing(spacing_s), seed);
    save_volume(p.image, out + ".vol");
    save_mask(p.mask, out + ".msk");
    info("phantom: wrote " + out + ".vol and " + out + ".msk");
    return 0;
}

struct DistanceArgs {
    std::string kind = "edt";
    std::string clicks_path;
    std::string polarity = "fg";
    float sigma = 0.0f;
    std::string image_path;
    std::string dims_s;
    std::string spacing_s = "1";
    std::string dilation = "ball";
    GeodesicFlags geodesic;
    std::string out;
};

int cmd_distance(const DistanceArgs& a) {
    const ClickSet clicks = load_clicks(a.clicks_path);
    const Polarity pol = polarity_from_name(a.polarity);

    DistanceMap map;
    if (a.kind == "edt") {
        Dims dims;
        Spacing spacing;
        if (!a.image_path.empty()) {
            const Volume img = load_volume(a.image_path);
            dims = img.dims;
            spacing = img.spacing;
        } else if (!a.dims_s.empty()) {
            dims = parse_dims(a.dims_s);
            spacing = parse_spacing(a.spacing_s);
        } else {
            throw UsageError("edt needs --image or --dims");
        }
        if (a.dilation == "ball") {
            map = edt_to_balls(clicks, pol, a.sigma, dims, spacing);
        } else if (a.dilation == "voxel") {
            map = edt(dilate_seeds(clicks, pol, a.sigma, dims), spacing);
        } else {
            throw UsageError("--dilation must be ball or voxel");
        }
    } else if (a.kind == "gdt") {
        if (a.image_path.empty()) throw UsageError("gdt needs --image");
        const Volume img = load_volume(a.image_path);
        map = gdt(dilate_seeds(clicks, pol, a.sigma, img.dims), img, a.geodesic.params());
    } else {
        throw UsageError("distance --kind must be edt or gdt");
    }
    save_distance_map(map, a.out);
    info("distance: wrote " + a.out);
    return 0;
}

struct EncodeArgs {
    std::string kind = "disk";
    std::string clicks_path;
    std::string polarity;
    float sigma = 1.0f;
    float theta = 0.0f;
    float a = 13.0f;
    float b = 0.15f;
    bool squared_exponent = false;
    bool invert_exp_gdt = false;
    int adaptive_neighborhood = 27;
    std::string image_path;
    std::string dims_s;
    std::string spacing_s = "1";
    GeodesicFlags geodesic;
    std::string out;
};

int cmd_encode(const EncodeArgs& a) {
    GuidanceConfig cfg;
    cfg.kind = parse_kind(a.kind);
    cfg.sigma = a.sigma;
    cfg.theta_percent = a.theta;
    cfg.a = a.a;
    cfg.b = a.b;
    cfg.squared_exponent = a.squared_exponent;
    cfg.invert_exp_gdt = a.invert_exp_gdt;
    cfg.adaptive_neighborhood = a.adaptive_neighborhood;
    cfg.geodesic = a.geodesic.params();

    if (guidance_needs_image(cfg.kind) && a.image_path.empty())
        throw UsageError(std::string("--kind ") + a.kind + " requires --image");

    std::optional<Volume> image;
    Dims dims;
    Spacing spacing;
    if (!a.image_path.empty()) {
        image = load_volume(a.image_path);
        dims = image->dims;
        spacing = image->spacing;
    } else if (!a.dims_s.empty()) {
        dims = parse_dims(a.dims_s);
        spacing = parse_spacing(a.spacing_s);
    } else {
        throw UsageError("encode needs --image or --dims");
    }

    const ClickSet clicks = load_clicks_for(a.clicks_path, a.polarity);
    const GuidanceVolume g = encode_guidance(clicks, dims, spacing, image ? &*image : nullptr,
                                             cfg);
    save_guidance(g, a.out, cfg.sigma, cfg.theta_percent);
    info("encode: wrote " + a.out);
    return 0;
}

struct SimulateArgs {
    std::string phantom;
    std::string dims_s = "64";
    std::string spacing_s = "1";
    std::uint64_t phantom_seed = 0;
    std::string image_path, gt_path;
    std::string kind = "disk";
    float sigma = 1.0f;
    float theta = 0.0f;
    float a = 13.0f;
    float b = 0.15f;
    int n_clicks = 10;
    double p_percent = 100.0;
    std::string placement = "error_center";
    bool zero_timings = false;
    GeodesicFlags geodesic;
    OracleFlags oracle;
    std::uint64_t seed = 0;
    std::string save_prediction;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
    Volume image;
    Mask gt;
    if (!a.phantom.empty()) {
        const Phantom p = make_phantom(phantom_kind_from_name(a.phantom), parse_dims(a.dims_s),
                                       parse_spacing(a.spacing_s), a.phantom_seed);
        image = p.image;
        gt = p.mask;
    } else if (!a.image_path.empty() && !a.gt_path.empty()) {
        image = load_volume(a.image_path);
        gt = load_mask(a.gt_path);
    } else {
        throw UsageError("simulate needs --phantom or both --image and --gt");
    }

    SimulationConfig cfg;
    cfg.n_clicks = a.n_clicks;
    cfg.p_interaction = a.p_percent / 100.0;
    cfg.rng_seed = a.seed;
    cfg.placement = click_placement_from_name(a.placement);
    cfg.zero_timings = a.zero_timings;
    cfg.guidance.kind = parse_kind(a.kind);
    cfg.guidance.sigma = a.sigma;
    cfg.guidance.theta_percent = a.theta;
    cfg.guidance.a = a.a;
    cfg.guidance.b = a.b;
    cfg.guidance.geodesic = a.geodesic.params();

    const GeodesicSeedOracle oracle(a.oracle.params());
    const SessionTrace trace = run_session(image, gt, oracle, cfg);
    save_trace(trace, a.out);
    if (!a.save_prediction.empty()) save_mask(trace.final_prediction, a.save_prediction);
    info("simulate: " + std::to_string(trace.clicks.size()) + " clicks, final dice " +
         std::to_string(trace.dice_trajectory.back()));
    return 0;
}

struct EvaluateArgs {
    std::vector<std::string> trace_paths;
    std::string out;
    std::string csv;
};

int cmd_evaluate(const EvaluateArgs& a) {
    std::vector<SessionTrace> traces;
    for (const std::string& p : a.trace_paths) traces.push_back(load_trace(p));
    const MetricsReport report = aggregate(traces);
    write_text(a.out, report_to_json(report).dump(2) + "\n");

    if (!a.csv.empty()) {
        // echo the configuration columns when they agree across traces
        const auto uniform = [&](auto select) -> std::string {
            std::string first = select(traces.front());
            for (const SessionTrace& t : traces)
                if (select(t) != first) return "-";
            return first;
        };
        const std::string kind = uniform([](const SessionTrace& t) {
            return std::string(guidance_kind_name(t.config.guidance.kind));
        });
        const std::string sigma = uniform([](const SessionTrace& t) {
            return kind_uses_sigma(t.config.guidance.kind)
                       ? detail::fmt_param(t.config.guidance.sigma)
                       : std::string("-");
        });
        const std::string theta = uniform([](const SessionTrace& t) {
            return kind_uses_theta(t.config.guidance.kind)
                       ? detail::fmt_param(t.config.guidance.theta_percent)
                       : std::string("-");
        });
        const std::string p = uniform([](const SessionTrace& t) {
            return detail::fmt_param(t.config.p_interaction * 100.0);
        });
        write_text(a.csv, metrics_csv_header() + "\n" +
                              metrics_csv_row(report, kind, sigma, theta, p) + "\n");
    }
    info("evaluate: " + std::to_string(traces.size()) + " traces -> " + a.out);
    return 0;
}

struct SweepArgs {
    std::string kinds = "disk,heatmap,edt,gdt,expgdt,adaptive";
    std::string sigmas = "0,1,5,9,13";
    std::string thetas = "0,10,30,50";
    std::string p_values = "50,75,100";
    int n_clicks = 10;
    std::string phantoms = "sphere,noisysphere";
    std::string dims_s = "32";
    int count = 1;
    std::vector<std::string> volume_pairs;
    std::string placement = "error_center";
    bool zero_timings = false;
    GeodesicFlags geodesic;
    OracleFlags oracle;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_sweep(const SweepArgs& a) {
    SweepSpec spec;
    spec.kinds.clear();
    for (const std::string& k : split_list(a.kinds)) spec.kinds.push_back(parse_kind(k));
    spec.sigmas.clear();
    for (const std::string& s : split_list(a.sigmas)) spec.sigmas.push_back(std::stof(s));
    spec.thetas.clear();
    for (const std::string& s : split_list(a.thetas)) spec.thetas.push_back(std::stof(s));
    spec.p_values.clear();
    for (const std::string& s : split_list(a.p_values))
        spec.p_values.push_back(std::stod(s) / 100.0);
    spec.n_clicks = a.n_clicks;
    spec.rng_seed = a.seed;
    spec.placement = click_placement_from_name(a.placement);
    spec.zero_timings = a.zero_timings;
    spec.geodesic = a.geodesic.params();
    spec.oracle = a.oracle.params();

    if (!a.volume_pairs.empty()) {
        for (const std::string& pair : a.volume_pairs) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos)
                throw UsageError("--volumes entries look like image.vol:mask.msk");
            SweepVolume v;
            v.name = pair.substr(0, colon);
            v.image = load_volume(pair.substr(0, colon));
            v.mask = load_mask(pair.substr(colon + 1));
            spec.volumes.push_back(std::move(v));
        }
    } else {
        const Dims dims = parse_dims(a.dims_s);
        for (const std::string& name : split_list(a.phantoms)) {
            const PhantomKind kind = phantom_kind_from_name(name);
            for (int i = 0; i < a.count; ++i) {
                Phantom p = make_phantom(kind, dims, {1, 1, 1},
                                         mix_seed(a.seed, static_cast<std::uint64_t>(i)));
                SweepVolume v;
                v.name = name + "#" + std::to_string(i);
                v.image = std::move(p.image);
                v.mask = std::move(p.mask);
                spec.volumes.push_back(std::move(v));
            }
        }
    }

    std::ostringstream log;
    const std::vector<SweepRow> rows = run_sweep(spec, &log);
    if (!g_quiet) std::cerr << log.str();
    write_text(a.out, sweep_csv(rows));
    info("sweep: " + std::to_string(rows.size()) + " rows -> " + a.out);
    return 0;
}

struct BenchArgs {
    std::string sizes = "64";
    std::string kinds = "disk,heatmap,edt,gdt,expgdt,adaptive";
    int reps = 5;
    int clicks = 10;
    float sigma = 5.0f;
    float theta = 0.0f;
    GeodesicFlags geodesic;
    double budget_seconds = 0.0;
    std::string json_path;
    std::uint64_t seed = 0;
};

int cmd_bench(const BenchArgs& a) {
    BenchSpec spec;
    spec.sizes.clear();
    for (const std::string& s : split_list(a.sizes)) spec.sizes.push_back(std::stoi(s));
    spec.kinds.clear();
    for (const std::string& k : split_list(a.kinds)) spec.kinds.push_back(parse_kind(k));
    spec.repetitions = a.reps;
    spec.n_clicks = a.clicks;
    spec.rng_seed = a.seed;
    spec.base.sigma = a.sigma;
    spec.base.theta_percent = a.theta;
    spec.base.geodesic = a.geodesic.params();

    std::vector<BenchCell> cells;
    try {
        cells = run_bench(spec);
    } catch (const std::bad_alloc&) {
        throw DataError("bench: allocation failed; try smaller --sizes");
    }
    print_bench_table(cells, std::cout);
    if (!a.json_path.empty()) write_text(a.json_path, bench_to_json(cells).dump(2) + "\n");

    if (a.budget_seconds > 0.0 && !bench_within_budget(cells, a.budget_seconds)) {
        std::cerr << "bench: budget of " << a.budget_seconds << " s exceeded\n";
        return kExitBudget;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxguide: volumetric click-guidance toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0 = hardware)")->capture_default_str();
    app.add_flag("--quiet", g_quiet, "Suppress progress output");

    auto* phantom = app.add_subcommand("phantom", "Generate a synthetic volume + ground truth");
    std::string ph_kind = "sphere", ph_dims = "32", ph_spacing = "1", ph_out;
    phantom->add_option("--kind", ph_kind, "sphere | twoblobs | noisysphere")
        ->capture_default_str();
    phantom->add_option("--dims", ph_dims, "N or NX,NY,NZ")->capture_default_str();
    phantom->add_option("--spacing", ph_spacing, "S or SX,SY,SZ (mm)")->capture_default_str();
    phantom->add_option("-o,--out", ph_out, "Output basename (writes .vol/.msk)")->required();

    auto* distance = app.add_subcommand("distance", "Distance transform from clicks");
    DistanceArgs da;
    distance->add_option("--kind", da.kind, "edt | gdt")->capture_default_str();
    distance->add_option("--clicks", da.clicks_path, "Clicks JSON file")->required();
    distance->add_option("--polarity", da.polarity, "fg | bg")->capture_default_str();
    distance->add_option("--sigma", da.sigma, "Seed dilation radius (voxels)")
        ->capture_default_str();
    distance->add_option("--image", da.image_path, "Image volume (.vol)");
    distance->add_option("--dims", da.dims_s, "Grid dims when no image is given");
    distance->add_option("--spacing", da.spacing_s, "Voxel spacing")->capture_default_str();
    distance->add_option("--dilation", da.dilation, "edt seed handling: ball | voxel")
        ->capture_default_str();
    da.geodesic.add_to(distance);
    distance->add_option("-o,--out", da.out, "Output distance map (.vol)")->required();

    auto* encode = app.add_subcommand("encode", "Encode clicks into a guidance volume");
    EncodeArgs ea;
    encode->add_option("--kind", ea.kind, "disk | heatmap | edt | gdt | expgdt | adaptive")
        ->capture_default_str();
    encode->add_option("--clicks", ea.clicks_path, "Clicks JSON file")->required();
    encode->add_option("--polarity", ea.polarity, "Select fg or bg clicks from the file");
    encode->add_option("--sigma", ea.sigma, "Radius / seed dilation (voxels)")
        ->capture_default_str();
    encode->add_option("--theta", ea.theta, "Truncate the top theta percent of distances")
        ->capture_default_str();
    encode->add_option("--a", ea.a, "Adaptive maximum radius")->capture_default_str();
    encode->add_option("--b", ea.b, "Adaptive radius decay")->capture_default_str();
    encode->add_flag("--squared-exponent", ea.squared_exponent,
                     "Square the heatmap distance (conventional Gaussian)");
    encode->add_flag("--invert-exp-gdt", ea.invert_exp_gdt, "Invert the exp-GDT signal");
    encode->add_option("--adaptive-neighborhood", ea.adaptive_neighborhood,
                       "Mean-distance neighborhood: 27 or 9")
        ->capture_default_str();
    encode->add_option("--image", ea.image_path, "Image volume (.vol)");
    encode->add_option("--dims", ea.dims_s, "Grid dims when no image is given");
    encode->add_option("--spacing", ea.spacing_s, "Voxel spacing")->capture_default_str();
    ea.geodesic.add_to(encode);
    encode->add_option("-o,--out", ea.out, "Output guidance volume (.vol)")->required();

    auto* simulate = app.add_subcommand("simulate", "Run one simulated refinement session");
    SimulateArgs sa;
    simulate->add_option("--phantom", sa.phantom, "sphere | twoblobs | noisysphere");
    simulate->add_option("--dims", sa.dims_s, "Phantom dims")->capture_default_str();
    simulate->add_option("--spacing", sa.spacing_s, "Phantom spacing")->capture_default_str();
    simulate->add_option("--phantom-seed", sa.phantom_seed, "Phantom generation seed")
        ->capture_default_str();
    simulate->add_option("--image", sa.image_path, "Image volume (.vol)");
    simulate->add_option("--gt", sa.gt_path, "Ground-truth mask (.msk)");
    simulate->add_option("--kind", sa.kind, "Guidance kind")->capture_default_str();
    simulate->add_option("--sigma", sa.sigma, "Guidance radius / dilation")
        ->capture_default_str();
    simulate->add_option("--theta", sa.theta, "Distance truncation percent")
        ->capture_default_str();
    simulate->add_option("--a", sa.a, "Adaptive maximum radius")->capture_default_str();
    simulate->add_option("--b", sa.b, "Adaptive radius decay")->capture_default_str();
    simulate->add_option("--n-clicks", sa.n_clicks, "Click budget per session")
        ->capture_default_str();
    simulate->add_option("--p", sa.p_percent, "Probability of interaction (percent)")
        ->capture_default_str();
    simulate->add_option("--placement", sa.placement, "error_center | uniform_in_error")
        ->capture_default_str();
    simulate->add_flag("--zero-timings", sa.zero_timings,
                       "Record zero timings for byte-reproducible traces");
    simulate->add_option("--save-prediction", sa.save_prediction,
                         "Also write the final prediction mask (.msk)");
    sa.geodesic.add_to(simulate);
    sa.oracle.add_to(simulate);
    simulate->add_option("-o,--out", sa.out, "Output trace (.json)")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Aggregate metrics over session traces");
    EvaluateArgs ev;
    evaluate->add_option("--traces", ev.trace_paths, "Trace JSON files")
        ->required()
        ->expected(-1);
    evaluate->add_option("-o,--out", ev.out, "Output report (.json)")->required();
    evaluate->add_option("--csv", ev.csv, "Also write a one-row CSV");

    auto* sweep = app.add_subcommand("sweep", "Metrics for every hyperparameter combination");
    SweepArgs sw;
    sweep->add_option("--kinds", sw.kinds, "Guidance kinds")->capture_default_str();
    sweep->add_option("--sigmas", sw.sigmas, "Radius grid")->capture_default_str();
    sweep->add_option("--thetas", sw.thetas, "Truncation grid (percent)")->capture_default_str();
    sweep->add_option("--p", sw.p_values, "Interaction probability grid (percent)")
        ->capture_default_str();
    sweep->add_option("--n-clicks", sw.n_clicks, "Click budget per session")
        ->capture_default_str();
    sweep->add_option("--phantom", sw.phantoms, "Phantom kinds for the volume set")
        ->capture_default_str();
    sweep->add_option("--dims", sw.dims_s, "Phantom dims")->capture_default_str();
    sweep->add_option("--count", sw.count, "Phantoms per kind")->capture_default_str();
    sweep->add_option("--volumes", sw.volume_pairs,
                      "image.vol:mask.msk pairs instead of phantoms")
        ->expected(-1);
    sweep->add_option("--placement", sw.placement, "error_center | uniform_in_error")
        ->capture_default_str();
    sweep->add_flag("--zero-timings", sw.zero_timings,
                    "Record zero timings for byte-reproducible CSVs");
    sw.geodesic.add_to(sweep);
    sw.oracle.add_to(sweep);
    sweep->add_option("-o,--out", sw.out, "Output CSV")->required();

    auto* bench = app.add_subcommand("bench", "Guidance encoding wall-time benchmark");
    BenchArgs ba;
    bench->add_option("--sizes", ba.sizes, "Cubic volume sizes")->capture_default_str();
    bench->add_option("--kinds", ba.kinds, "Guidance kinds")->capture_default_str();
    bench->add_option("--reps", ba.reps, "Repetitions per cell")->capture_default_str();
    bench->add_option("--clicks", ba.clicks, "Clicks per encoding")->capture_default_str();
    bench->add_option("--sigma", ba.sigma, "Guidance radius")->capture_default_str();
    bench->add_option("--theta", ba.theta, "Distance truncation percent")->capture_default_str();
    ba.geodesic.add_to(bench);
    bench->add_option("--budget-seconds", ba.budget_seconds,
                      "Fail (exit 3) when any median exceeds this");
    bench->add_option("--json", ba.json_path, "Also write results as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (threads > 0) set_thread_count(threads);
    sa.seed = seed;
    sw.seed = seed;
    ba.seed = seed;

    try {
        if (phantom->parsed()) return cmd_phantom(ph_kind, ph_dims, ph_spacing, seed, ph_out);
        if (distance->parsed()) return cmd_distance(da);
        if (encode->parsed()) return cmd_encode(ea);
        if (simulate->parsed()) return cmd_simulate(sa);
        if (evaluate->parsed()) return cmd_evaluate(ev);
        if (sweep->parsed()) return cmd_sweep(sw);
        if (bench->parsed()) return cmd_bench(ba);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
