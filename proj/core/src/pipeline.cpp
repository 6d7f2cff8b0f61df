#include "vidseg/pipeline.hpp"

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "vidseg/motion.hpp"
#include "vidseg/warp.hpp"

namespace vidseg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn, adds its wall time to slot, and returns its result.
template <typename Fn>
auto timed(double& slot, Fn&& fn) {
    const auto start = Clock::now();
    auto result = fn();
    slot += seconds_since(start);
    return result;
}

const MotionField& motion_for(std::span<const MotionField> motion, std::size_t index) {
    if (index >= motion.size()) {
        throw std::invalid_argument("missing motion field for frame " + std::to_string(index));
    }
    return motion[index];
}

template <typename Fn>
auto with_frame_context(std::size_t index, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error("frame " + std::to_string(index) + ": " + e.what());
    }
}

void check_stream(std::span<const Frame> frames) {
    if (frames.empty()) {
        throw std::invalid_argument("pipeline: stream must contain at least one frame");
    }
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].width() != frames[0].width() || frames[i].height() != frames[0].height()) {
            throw std::invalid_argument("pipeline: frame " + std::to_string(i) +
                                        " dimensions differ from frame 0");
        }
    }
}

void check_model(const PipelineConfig& config, const TaskNetwork& task_net) {
    config.validate();
    if (config.num_classes != 0 && config.num_classes != task_net.num_classes()) {
        throw std::invalid_argument("pipeline: config expects " +
                                    std::to_string(config.num_classes) +
                                    " classes but the task network produces " +
                                    std::to_string(task_net.num_classes()));
    }
}

FusionWeights resolve_weights(const PipelineConfig& config, const FusionWeights* weights) {
    if (weights) {
        if (weights->kind == FusionKind::conv && !weights->conv) {
            throw std::invalid_argument("pipeline: conv fusion selected without a kernel");
        }
        return *weights;
    }
    switch (config.fusion) {
        case FusionKind::max: return FusionWeights::maximum();
        case FusionKind::average: return FusionWeights::averaging();
        case FusionKind::conv:
            throw std::invalid_argument("pipeline: conv fusion requires explicit weights");
    }
    throw std::invalid_argument("pipeline: unknown fusion kind");
}

}  // namespace

bool same_outputs(const StreamResult& a, const StreamResult& b) {
    return a.segmentations == b.segmentations && a.keyframe_flags == b.keyframe_flags;
}

StreamResult run_baseline(std::span<const Frame> frames, const FeatureNetwork& feature_net,
                          const TaskNetwork& task_net) {
    check_stream(frames);
    StreamResult result;
    result.segmentations.reserve(frames.size());
    result.per_frame_cost.resize(frames.size());
    result.keyframe_flags.assign(frames.size(), true);

    for (std::size_t i = 0; i < frames.size(); ++i) {
        const Frame& frame = frames[i];
        FrameCost& cost = result.per_frame_cost[i];
        with_frame_context(i, [&] {
            FeatureMap f = timed(cost.feature, [&] { return feature_net.extract(frame); });
            result.segmentations.push_back(timed(
                cost.task, [&] { return task_net.segment(f, frame.width(), frame.height()); }));
            return 0;
        });
    }
    return result;
}

StreamResult run_prop(std::span<const Frame> frames, std::span<const MotionField> motion,
                      const PipelineConfig& config, const FeatureNetwork& feature_net,
                      const TaskNetwork& task_net) {
    check_stream(frames);
    check_model(config, task_net);
    const int n = config.keyframe_interval;
    const int stride = feature_net.stride();

    StreamResult result;
    result.segmentations.reserve(frames.size());
    result.per_frame_cost.resize(frames.size());
    result.keyframe_flags.reserve(frames.size());

    std::optional<FeatureMap> cache;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const Frame& frame = frames[i];
        const bool keyframe = i % n == 0;
        FrameCost& cost = result.per_frame_cost[i];
        with_frame_context(i, [&] {
            FeatureMap f = keyframe
                               ? timed(cost.feature, [&] { return feature_net.extract(frame); })
                               : timed(cost.warp, [&] {
                                     return bilinear_warp(
                                         *cache, to_warp_field(motion_for(motion, i), stride));
                                 });
            result.segmentations.push_back(timed(
                cost.task, [&] { return task_net.segment(f, frame.width(), frame.height()); }));
            cache = std::move(f);
            return 0;
        });
        result.keyframe_flags.push_back(keyframe);
    }
    return result;
}

StreamResult run_inter(std::span<const Frame> frames, std::span<const MotionField> motion,
                       const PipelineConfig& config, const FeatureNetwork& feature_net,
                       const TaskNetwork& task_net, const FusionWeights* weights) {
    check_stream(frames);
    check_model(config, task_net);
    const FusionWeights fusion_weights = resolve_weights(config, weights);
    const std::size_t count = frames.size();
    const int n = config.keyframe_interval;
    const int stride = feature_net.stride();

    StreamResult result;
    result.segmentations.resize(count, SegMap(1, 1, {0}, 1));
    result.per_frame_cost.resize(count);
    result.keyframe_flags.resize(count, false);
    result.output_delay_frames = n > 1 ? n : 0;

    // Features of the upcoming keyframe, computed one interval early.
    std::optional<FeatureMap> next_cache;
    std::size_t next_cache_index = 0;

    for (std::size_t k = 0; k < count; k += n) {
        const Frame& key = frames[k];
        FrameCost& key_cost = result.per_frame_cost[k];
        result.keyframe_flags[k] = true;

        FeatureMap f_key = with_frame_context(k, [&] {
            if (next_cache && next_cache_index == k) {
                return std::move(*next_cache);
            }
            return timed(key_cost.feature, [&] { return feature_net.extract(key); });
        });
        next_cache.reset();
        result.segmentations[k] = with_frame_context(k, [&] {
            return timed(key_cost.task,
                         [&] { return task_net.segment(f_key, key.width(), key.height()); });
        });

        const std::size_t next_key = k + n;
        const std::size_t last = std::min(count - 1, k + n - 1);
        if (next_key < count) {
            // Closing keyframe exists: precompute its features and chain both
            // directions across the interval.
            FeatureMap f_next = with_frame_context(next_key, [&] {
                return timed(result.per_frame_cost[next_key].feature,
                             [&] { return feature_net.extract(frames[next_key]); });
            });

            std::vector<FeatureMap> forward{std::move(f_key)};
            std::vector<FeatureMap> backward{f_next};
            for (int p = 1; p <= n - 1; ++p) {
                // Forward step p crosses frame k+p; backward step p crosses
                // frame k+n-p+1 back to k+n-p. Warp time lands on the frame
                // whose features the step produces.
                const std::size_t fwd_frame = k + p;
                const std::size_t bwd_frame = k + n - p;
                forward.push_back(with_frame_context(fwd_frame, [&] {
                    return timed(result.per_frame_cost[fwd_frame].warp, [&] {
                        return bilinear_warp(
                            forward.back(),
                            to_warp_field(motion_for(motion, fwd_frame), stride));
                    });
                }));
                backward.push_back(with_frame_context(bwd_frame, [&] {
                    return timed(result.per_frame_cost[bwd_frame].warp, [&] {
                        return bilinear_warp(
                            backward.back(),
                            to_warp_field(negate(motion_for(motion, bwd_frame + 1)), stride));
                    });
                }));
            }

            for (int p = 1; p <= n - 1; ++p) {
                const std::size_t i = k + p;
                const Frame& frame = frames[i];
                FrameCost& cost = result.per_frame_cost[i];
                const Alpha alpha = alpha_for(n, p);
                with_frame_context(i, [&] {
                    FeatureMap fused = timed(cost.fusion, [&] {
                        return fuse(forward[p], backward[n - p], alpha.forward, fusion_weights);
                    });
                    result.segmentations[i] = timed(cost.task, [&] {
                        return task_net.segment(fused, frame.width(), frame.height());
                    });
                    return 0;
                });
            }

            next_cache = std::move(backward.front());
            next_cache_index = next_key;
        } else if (last > k) {
            // No closing keyframe: finish the stream with forward propagation.
            FeatureMap cache = std::move(f_key);
            for (std::size_t i = k + 1; i <= last; ++i) {
                const Frame& frame = frames[i];
                FrameCost& cost = result.per_frame_cost[i];
                with_frame_context(i, [&] {
                    cache = timed(cost.warp, [&] {
                        return bilinear_warp(cache, to_warp_field(motion_for(motion, i), stride));
                    });
                    result.segmentations[i] = timed(cost.task, [&] {
                        return task_net.segment(cache, frame.width(), frame.height());
                    });
                    return 0;
                });
            }
        }
    }
    return result;
}

StreamResult run_scheme(std::span<const Frame> frames, std::span<const MotionField> motion,
                        const PipelineConfig& config, const FeatureNetwork& feature_net,
                        const TaskNetwork& task_net, const FusionWeights* weights) {
    switch (config.mode) {
        case SchemeMode::baseline: return run_baseline(frames, feature_net, task_net);
        case SchemeMode::prop: return run_prop(frames, motion, config, feature_net, task_net);
        case SchemeMode::inter:
            return run_inter(frames, motion, config, feature_net, task_net, weights);
    }
    throw std::invalid_argument("run_scheme: unknown mode");
}

}  // namespace vidseg
