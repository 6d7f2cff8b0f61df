#include <benchmark/benchmark.h>

#include <vector>

#include "vidseg/eval.hpp"
#include "vidseg/model.hpp"
#include "vidseg/motion.hpp"
#include "vidseg/pipeline.hpp"
#include "vidseg/scene.hpp"

namespace {

struct StreamSetup {
    vidseg::SyntheticScene scene;
    std::vector<vidseg::MotionField> motion;
    vidseg::ToyFeatureNetwork feature_net;
    vidseg::ToyTaskNetwork task_net;

    explicit StreamSetup(int frame_count)
        : scene([&] {
              vidseg::SceneSpec spec = vidseg::benchmark_scene_spec();
              spec.frame_count = frame_count;
              return vidseg::make_scene(spec);
          }()),
          motion(vidseg::estimate_stream_motion(scene.frames, {.search_radius = 8}, 4)),
          task_net(vidseg::ToyModel::from_colors(scene.spec.palette())) {}
};

void BM_ToyFeatures(benchmark::State& state) {
    const StreamSetup setup(2);
    for (auto _ : state) {
        vidseg::FeatureMap f = vidseg::toy_features(setup.scene.frames[1]);
        benchmark::DoNotOptimize(f);
    }
}

void BM_ToyTask(benchmark::State& state) {
    const StreamSetup setup(2);
    const vidseg::FeatureMap f = vidseg::toy_features(setup.scene.frames[1]);
    for (auto _ : state) {
        vidseg::SegMap seg =
            vidseg::toy_task(f, setup.task_net.model(), setup.scene.spec.width,
                             setup.scene.spec.height);
        benchmark::DoNotOptimize(seg);
    }
}

void BM_RunScheme(benchmark::State& state) {
    const StreamSetup setup(30);
    vidseg::PipelineConfig config;
    config.mode = static_cast<vidseg::SchemeMode>(state.range(0));
    config.keyframe_interval = static_cast<int>(state.range(1));
    config.num_classes = setup.task_net.num_classes();

    for (auto _ : state) {
        vidseg::StreamResult result = vidseg::run_scheme(
            setup.scene.frames, setup.motion, config, setup.feature_net, setup.task_net);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * setup.scene.frames.size());
}

}  // namespace

BENCHMARK(BM_ToyFeatures)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ToyTask)->Unit(benchmark::kMicrosecond);

BENCHMARK(BM_RunScheme)
    ->ArgNames({"mode", "interval"})
    ->Args({static_cast<int>(vidseg::SchemeMode::baseline), 1})
    ->Args({static_cast<int>(vidseg::SchemeMode::prop), 5})
    ->Args({static_cast<int>(vidseg::SchemeMode::prop), 10})
    ->Args({static_cast<int>(vidseg::SchemeMode::inter), 5})
    ->Args({static_cast<int>(vidseg::SchemeMode::inter), 10})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
