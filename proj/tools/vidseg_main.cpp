#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vidseg/eval.hpp"
#include "vidseg/io.hpp"
#include "vidseg/model.hpp"
#include "vidseg/motion.hpp"
#include "vidseg/pipeline.hpp"
#include "vidseg/scene.hpp"
#include "vidseg/warp.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vidseg;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::map<std::string, SchemeMode> kModeNames{
    {"baseline", SchemeMode::baseline}, {"prop", SchemeMode::prop}, {"inter", SchemeMode::inter}};
const std::map<std::string, FusionKind> kFusionNames{
    {"max", FusionKind::max}, {"avg", FusionKind::average}, {"conv", FusionKind::conv}};

struct Globals {
    unsigned seed = 1;
    int workers = 1;
};

// Scene sources accepted on the command line: the bundled benchmark by name,
// a scene spec (JSON), or a directory produced by make-scene.
struct LoadedScene {
    SyntheticScene scene;
    ToyModel model;
};

LoadedScene load_any_scene(const std::string& arg, std::optional<unsigned> seed_override) {
    const auto from_spec = [&](SceneSpec spec) {
        if (seed_override) spec.seed = *seed_override;
        SyntheticScene scene = make_scene(spec);
        ToyModel model = ToyModel::from_colors(spec.palette());
        return LoadedScene{std::move(scene), std::move(model)};
    };
    if (arg == "benchmark") {
        return from_spec(benchmark_scene_spec());
    }
    const fs::path path(arg);
    if (fs::is_directory(path)) {
        const SceneSpec spec = load_scene_spec(path / "scene.json");
        SyntheticScene scene;
        scene.spec = spec;
        scene.frames = load_frames(path / "frames");
        scene.ground_truth = load_labels(path / "gt", spec.num_classes());
        if (scene.frames.size() != scene.ground_truth.size()) {
            throw std::runtime_error(path.string() + ": frames/ and gt/ differ in length");
        }
        ModelBundle bundle = load_model(path / "model.json");
        return {std::move(scene), std::move(bundle.model)};
    }
    return from_spec(load_scene_spec(path));
}

int cmd_make_scene(const std::string& spec_arg, const fs::path& out_dir, const std::string& ext,
                   std::optional<unsigned> seed_override) {
    SceneSpec spec =
        spec_arg == "benchmark" ? benchmark_scene_spec() : load_scene_spec(spec_arg);
    if (seed_override) spec.seed = *seed_override;
    const SyntheticScene scene = make_scene(spec);

    fs::create_directories(out_dir);
    write_frames(scene.frames, out_dir / "frames", ext == "ppm" ? "ppm" : "png");
    write_label_maps(scene.ground_truth, out_dir / "gt", ext == "ppm" ? "pgm" : "png");
    save_scene_spec(spec, out_dir / "scene.json");
    save_model({ToyModel::from_colors(spec.palette()), FusionWeights::averaging()},
               out_dir / "model.json");
    std::printf("wrote %zu frames (%dx%d, %d classes) to %s\n", scene.frames.size(), spec.width,
                spec.height, spec.num_classes(), out_dir.string().c_str());
    return 0;
}

int cmd_estimate_motion(const fs::path& frames_dir, const fs::path& out_path, int radius,
                        const Globals& globals) {
    const std::vector<Frame> frames = load_frames(frames_dir);
    const auto start = Clock::now();
    const std::vector<MotionField> motion =
        estimate_stream_motion(frames, {kDefaultBlockSize, radius}, globals.workers);
    const double elapsed = seconds_since(start);
    write_motion_file(motion, out_path);
    std::printf("estimated %zu motion fields (%dx%d blocks, radius %d) in %.2f s -> %s\n",
                motion.size(), motion[0].grid_w(), motion[0].grid_h(), radius, elapsed,
                out_path.string().c_str());
    return 0;
}

int cmd_run(const std::string& mode_name, int interval, const std::string& fusion_name,
            const fs::path& frames_dir, const std::string& motion_path,
            const std::string& model_path, int classes, int radius, const fs::path& out_dir,
            const Globals& globals) {
    const SchemeMode mode = kModeNames.at(mode_name);
    const FusionKind fusion = kFusionNames.at(fusion_name);

    const std::vector<Frame> frames = load_frames(frames_dir);

    std::optional<ModelBundle> bundle;
    if (!model_path.empty()) {
        bundle = load_model(model_path);
    } else if (classes > 0) {
        bundle = ModelBundle{ToyModel::random(classes, globals.seed), FusionWeights::averaging()};
    } else {
        throw std::runtime_error("run: provide --model or --classes");
    }
    const ToyFeatureNetwork feature_net;
    const ToyTaskNetwork task_net(bundle->model);

    std::vector<MotionField> motion;
    if (mode != SchemeMode::baseline && interval > 1) {
        motion = motion_path.empty()
                     ? estimate_stream_motion(frames, {kDefaultBlockSize, radius},
                                              globals.workers)
                     : read_motion_file(motion_path);
    } else {
        motion.push_back(MotionField::zero_for_frame(frames[0].width(), frames[0].height()));
    }

    PipelineConfig config;
    config.keyframe_interval = interval;
    config.fusion = fusion;
    config.mode = mode;
    config.num_classes = bundle->model.num_classes();
    config.search_radius = radius;

    const FusionWeights* weights =
        fusion == FusionKind::conv && bundle->fusion.kind == FusionKind::conv ? &bundle->fusion
                                                                              : nullptr;
    const auto start = Clock::now();
    const StreamResult result =
        run_scheme(frames, motion, config, feature_net, task_net, weights);
    const double elapsed = seconds_since(start);

    write_label_maps(result.segmentations, out_dir, "png", "seg");
    std::printf("%s n=%d: %zu frames in %.3f s (%.1f fps) -> %s\n", mode_name.c_str(), interval,
                frames.size(), elapsed, frames.size() / elapsed, out_dir.string().c_str());
    return 0;
}

int cmd_evaluate(const fs::path& seg_dir, const fs::path& gt_dir, int classes, int interval) {
    const std::vector<SegMap> preds = load_labels(seg_dir, classes);
    const std::vector<SegMap> gts = load_labels(gt_dir, classes);
    const MiouResult result = miou(preds, gts, classes);
    std::printf("mIoU: %.4f\n", result.mean);
    for (std::size_t c = 0; c < result.per_class.size(); ++c) {
        if (result.present[c]) {
            std::printf("  class %zu: %.4f\n", c, result.per_class[c]);
        }
    }
    if (interval > 1) {
        const std::vector<double> per_offset = per_offset_miou(preds, gts, classes, interval);
        for (std::size_t p = 0; p < per_offset.size(); ++p) {
            std::printf("  offset %zu: %.4f\n", p, per_offset[p]);
        }
    }
    return 0;
}

int cmd_sweep(const std::string& scene_arg, const std::vector<int>& intervals,
              const std::vector<std::string>& scheme_names, const std::string& fusion_name,
              int reps, int radius, bool include_motion_cost, const std::string& out_csv,
              const std::string& out_svg, std::optional<unsigned> seed_override,
              const Globals& globals) {
    LoadedScene loaded = load_any_scene(scene_arg, seed_override);
    const ToyFeatureNetwork feature_net;
    const ToyTaskNetwork task_net(std::move(loaded.model));

    SweepOptions options;
    options.intervals = intervals;
    options.schemes.clear();
    for (const std::string& name : scheme_names) options.schemes.push_back(kModeNames.at(name));
    options.fusion = kFusionNames.at(fusion_name);
    options.repetitions = reps;
    options.include_motion_cost = include_motion_cost;
    options.search_radius = radius;
    options.workers = globals.workers;

    const std::vector<IntervalReport> reports =
        sweep(loaded.scene, options, feature_net, task_net);

    if (out_csv.empty() || out_csv == "-") {
        const fs::path tmp = fs::temp_directory_path() / "vidseg_sweep.csv";
        write_report_csv(reports, tmp);
        std::ifstream in(tmp);
        std::cout << in.rdbuf();
    } else {
        write_report_csv(reports, out_csv);
        std::printf("wrote %s\n", out_csv.c_str());
    }
    if (!out_svg.empty()) {
        write_report_svg(reports, out_svg);
        std::printf("wrote %s\n", out_svg.c_str());
    }
    return 0;
}

void print_prediction_table(const CostInputs& costs, const std::vector<int>& intervals) {
    std::printf("%-10s %12s %12s %12s %12s\n", "interval", "baseline", "prop-flow", "prop-bmv",
                "inter-bmv");
    for (int n : intervals) {
        const ThroughputPrediction p = throughput_model(costs, n);
        std::printf("%-10d %9.2f fps %9.2f fps %9.2f fps %9.2f fps\n", n, p.baseline_fps,
                    p.prop_flow_fps, p.prop_bmv_fps, p.inter_bmv_fps);
    }
}

int cmd_bench(double feature_ms, double warp_ms, double task_ms, double flow_ms,
              double fusion_ms, bool skip_measured, const Globals& globals) {
    const CostInputs costs{feature_ms / 1000.0, warp_ms / 1000.0, task_ms / 1000.0,
                           flow_ms / 1000.0, fusion_ms / 1000.0};
    const ThroughputPrediction at2 = throughput_model(costs, 2);
    std::printf("analytic model (feature %.1f ms, warp %.1f ms, task %.1f ms, flow %.1f ms, "
                "fusion %.1f ms)\n",
                feature_ms, warp_ms, task_ms, flow_ms, fusion_ms);
    std::printf("intermediate-frame cost: flow-based %.1f ms, block-vector %.1f ms "
                "(%.1f%% lower)\n",
                at2.prop_flow_intermediate * 1000.0, at2.prop_bmv_intermediate * 1000.0,
                (1.0 - at2.prop_bmv_intermediate / at2.prop_flow_intermediate) * 100.0);
    print_prediction_table(costs, {1, 2, 4, 8, 10});

    if (skip_measured) return 0;

    // Measure the toy model's component costs on the bundled benchmark and
    // rerun the prediction from those.
    SceneSpec spec = benchmark_scene_spec();
    spec.seed = globals.seed;
    const SyntheticScene scene = make_scene(spec);
    const ToyFeatureNetwork feature_net;
    const ToyTaskNetwork task_net(ToyModel::from_colors(spec.palette()));
    const std::vector<MotionField> motion =
        estimate_stream_motion(scene.frames, {kDefaultBlockSize, 8}, globals.workers);

    CostInputs measured;
    {
        std::vector<FeatureMap> features;
        auto start = Clock::now();
        for (const Frame& f : scene.frames) features.push_back(feature_net.extract(f));
        measured.feature = seconds_since(start) / scene.frames.size();

        start = Clock::now();
        for (std::size_t i = 0; i < scene.frames.size(); ++i) {
            task_net.segment(features[i], spec.width, spec.height);
        }
        measured.task = seconds_since(start) / scene.frames.size();

        start = Clock::now();
        for (std::size_t i = 1; i < scene.frames.size(); ++i) {
            bilinear_warp(features[i - 1], to_warp_field(negate(motion[i]), kFeatureStride));
        }
        measured.warp = seconds_since(start) / (scene.frames.size() - 1);

        const FusionWeights avg = FusionWeights::averaging();
        start = Clock::now();
        for (std::size_t i = 1; i < scene.frames.size(); ++i) {
            fuse(features[i - 1], features[i], 0.5, avg);
        }
        measured.fusion = seconds_since(start) / (scene.frames.size() - 1);
    }
    std::printf("\nmeasured toy model on the bundled benchmark (%zu frames %dx%d)\n",
                scene.frames.size(), spec.width, spec.height);
    std::printf("feature %.3f ms, warp %.3f ms, task %.3f ms, fusion %.3f ms per frame\n",
                measured.feature * 1000.0, measured.warp * 1000.0, measured.task * 1000.0,
                measured.fusion * 1000.0);
    print_prediction_table(measured, {1, 2, 4, 8, 10});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed-motion feature propagation for video segmentation"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals globals;
    std::optional<unsigned> seed_override;
    app.add_option_function<unsigned>(
           "--seed",
           [&](unsigned s) {
               globals.seed = s;
               seed_override = s;
           },
           "Override the scene/model RNG seed");
    app.add_option("--workers", globals.workers, "Worker threads for motion estimation")
        ->check(CLI::Range(1, 256));

    // make-scene
    auto* make_cmd = app.add_subcommand("make-scene", "Render a synthetic scene to disk");
    std::string make_spec;
    fs::path make_out;
    std::string make_ext = "png";
    make_cmd->add_option("spec", make_spec, "Scene spec JSON, or 'benchmark'")->required();
    make_cmd->add_option("-o,--output", make_out, "Output directory")->required();
    make_cmd->add_option("--ext", make_ext, "Image format")
        ->check(CLI::IsMember({"png", "ppm"}));

    // estimate-motion
    auto* motion_cmd =
        app.add_subcommand("estimate-motion", "Compute block motion fields for a frame directory");
    fs::path motion_frames, motion_out;
    int motion_radius = 8;
    motion_cmd->add_option("frames", motion_frames, "Directory of frames")->required();
    motion_cmd->add_option("-o,--output", motion_out, "Output motion file")->required();
    motion_cmd->add_option("--radius", motion_radius, "Search radius in pixels")
        ->check(CLI::Range(0, 256));

    // run
    auto* run_cmd = app.add_subcommand("run", "Segment a frame directory");
    std::string run_mode = "baseline", run_fusion = "avg", run_motion, run_model;
    int run_interval = 1, run_classes = 0, run_radius = 8;
    fs::path run_frames, run_out;
    run_cmd->add_option("frames", run_frames, "Directory of frames")->required();
    run_cmd->add_option("-o,--output", run_out, "Output directory for label maps")->required();
    run_cmd->add_option("--mode", run_mode, "Scheduling mode")
        ->check(CLI::IsMember({"baseline", "prop", "inter"}));
    run_cmd->add_option("--interval", run_interval, "Keyframe interval")->check(CLI::Range(1, 1000));
    run_cmd->add_option("--fusion", run_fusion, "Fusion operator for inter mode")
        ->check(CLI::IsMember({"max", "avg", "conv"}));
    run_cmd->add_option("--motion", run_motion, "Motion sidecar (estimated when absent)");
    run_cmd->add_option("--model", run_model, "Model JSON");
    run_cmd->add_option("--classes", run_classes,
                        "Build a seeded random model with this many classes");
    run_cmd->add_option("--radius", run_radius, "Search radius when estimating motion")
        ->check(CLI::Range(0, 256));

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
    fs::path eval_seg, eval_gt;
    int eval_classes = 0, eval_interval = 1;
    eval_cmd->add_option("predictions", eval_seg, "Directory of predicted label maps")->required();
    eval_cmd->add_option("truth", eval_gt, "Directory of ground-truth label maps")->required();
    eval_cmd->add_option("--classes", eval_classes, "Number of classes")
        ->required()
        ->check(CLI::Range(1, 255));
    eval_cmd->add_option("--interval", eval_interval, "Also report per-offset accuracy")
        ->check(CLI::Range(1, 1000));

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy/throughput sweep over intervals");
    std::string sweep_scene = "benchmark", sweep_fusion = "avg", sweep_csv, sweep_svg;
    std::vector<int> sweep_intervals{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<std::string> sweep_schemes{"baseline", "prop", "inter"};
    int sweep_reps = 3, sweep_radius = 8;
    bool sweep_motion_cost = false;
    sweep_cmd->add_option("--scene", sweep_scene,
                          "'benchmark', a scene spec JSON, or a make-scene directory");
    sweep_cmd->add_option("--intervals", sweep_intervals, "Keyframe intervals to test");
    sweep_cmd->add_option("--schemes", sweep_schemes, "Schemes to test")
        ->check(CLI::IsMember({"baseline", "prop", "inter"}));
    sweep_cmd->add_option("--fusion", sweep_fusion, "Fusion operator for inter")
        ->check(CLI::IsMember({"max", "avg", "conv"}));
    sweep_cmd->add_option("--reps", sweep_reps, "Timed repetitions per configuration")
        ->check(CLI::Range(1, 100));
    sweep_cmd->add_option("--radius", sweep_radius, "Motion search radius")
        ->check(CLI::Range(0, 256));
    sweep_cmd->add_flag("--include-motion-cost", sweep_motion_cost,
                        "Charge motion estimation to throughput");
    sweep_cmd->add_option("-o,--output", sweep_csv, "CSV path ('-' for stdout)");
    sweep_cmd->add_option("--svg", sweep_svg, "Also write an SVG chart");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Analytic throughput model and measured costs");
    double bench_feature = 228.0, bench_warp = 4.0, bench_task = 50.0, bench_flow = 62.0,
           bench_fusion = 2.0;
    bool bench_no_measure = false;
    bench_cmd->add_option("--feature-ms", bench_feature, "Feature-network cost per frame");
    bench_cmd->add_option("--warp-ms", bench_warp, "Warp cost per frame");
    bench_cmd->add_option("--task-ms", bench_task, "Task-network cost per frame");
    bench_cmd->add_option("--flow-ms", bench_flow, "Optical-flow cost per frame");
    bench_cmd->add_option("--fusion-ms", bench_fusion, "Fusion cost per frame");
    bench_cmd->add_flag("--no-measure", bench_no_measure, "Skip the measured section");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*make_cmd) return cmd_make_scene(make_spec, make_out, make_ext, seed_override);
        if (*motion_cmd) {
            return cmd_estimate_motion(motion_frames, motion_out, motion_radius, globals);
        }
        if (*run_cmd) {
            return cmd_run(run_mode, run_interval, run_fusion, run_frames, run_motion, run_model,
                           run_classes, run_radius, run_out, globals);
        }
        if (*eval_cmd) return cmd_evaluate(eval_seg, eval_gt, eval_classes, eval_interval);
        if (*sweep_cmd) {
            return cmd_sweep(sweep_scene, sweep_intervals, sweep_schemes, sweep_fusion,
                             sweep_reps, sweep_radius, sweep_motion_cost, sweep_csv, sweep_svg,
                             seed_override, globals);
        }
        if (*bench_cmd) {
            return cmd_bench(bench_feature, bench_warp, bench_task, bench_flow, bench_fusion,
                             bench_no_measure, globals);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
