#include <benchmark/benchmark.h>

#include <utility>

#include "vidseg/motion.hpp"
#include "vidseg/scene.hpp"

namespace {

// Two mid-stream frames of the bundled scene: textured background plus
// several moving objects, so the search has real work to do.
std::pair<vidseg::Frame, vidseg::Frame> scene_pair() {
    vidseg::SceneSpec spec = vidseg::benchmark_scene_spec();
    spec.frame_count = 32;
    vidseg::SyntheticScene scene = vidseg::make_scene(spec);
    return {scene.frames[30], scene.frames[31]};
}

void BM_EstimateMotion(benchmark::State& state) {
    const auto [prev, curr] = scene_pair();
    vidseg::MatchParams params;
    params.search_radius = static_cast<int>(state.range(0));
    const int workers = static_cast<int>(state.range(1));

    for (auto _ : state) {
        vidseg::MotionField mv = vidseg::estimate_motion(prev, curr, params, workers);
        benchmark::DoNotOptimize(mv);
    }
    state.SetItemsProcessed(state.iterations() * prev.width() * prev.height());
}

void BM_EstimateStreamMotion(benchmark::State& state) {
    vidseg::SceneSpec spec = vidseg::benchmark_scene_spec();
    spec.frame_count = static_cast<int>(state.range(0));
    vidseg::SyntheticScene scene = vidseg::make_scene(spec);
    vidseg::MatchParams params;
    params.search_radius = 8;

    for (auto _ : state) {
        auto motion = vidseg::estimate_stream_motion(scene.frames, params, 4);
        benchmark::DoNotOptimize(motion);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_EstimateMotion)
    ->ArgNames({"radius", "workers"})
    ->Args({4, 1})
    ->Args({8, 1})
    ->Args({16, 1})
    ->Args({8, 4})
    ->Args({16, 4})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(BM_EstimateStreamMotion)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
