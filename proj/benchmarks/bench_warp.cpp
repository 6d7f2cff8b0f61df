#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vidseg/model.hpp"
#include "vidseg/warp.hpp"

namespace {

vidseg::FeatureMap random_map(int channels, int fh, int fw, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> data(static_cast<std::size_t>(channels) * fh * fw);
    for (double& v : data) v = dist(rng);
    return {channels, fh, fw, vidseg::kFeatureStride, std::move(data)};
}

vidseg::WarpField random_field(int fh, int fw, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    std::vector<vidseg::Vec2> offsets(static_cast<std::size_t>(fh) * fw);
    for (auto& v : offsets) v = {dist(rng), dist(rng)};
    return {fh, fw, std::move(offsets)};
}

void BM_BilinearWarp(benchmark::State& state) {
    const int channels = static_cast<int>(state.range(0));
    const int fh = static_cast<int>(state.range(1));
    const int fw = static_cast<int>(state.range(2));
    const vidseg::FeatureMap f = random_map(channels, fh, fw, 11);
    const vidseg::WarpField w = random_field(fh, fw, 17);

    for (auto _ : state) {
        vidseg::FeatureMap out = vidseg::bilinear_warp(f, w);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * channels * fh * fw);
}

void BM_PropagateChain(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    const vidseg::FeatureMap f = random_map(vidseg::kToyChannels, 8, 10, 11);
    std::vector<vidseg::WarpField> fields;
    for (int i = 0; i < steps; ++i) fields.push_back(random_field(8, 10, 20 + i));

    for (auto _ : state) {
        auto chain = vidseg::propagate_chain(f, steps, fields);
        benchmark::DoNotOptimize(chain);
    }
}

}  // namespace

BENCHMARK(BM_BilinearWarp)
    ->ArgNames({"c", "fh", "fw"})
    ->Args({12, 8, 10})
    ->Args({12, 32, 40})
    ->Args({64, 32, 40})
    ->Unit(benchmark::kMicrosecond);

BENCHMARK(BM_PropagateChain)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMicrosecond);
