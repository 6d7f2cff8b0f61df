#pragma once

#include <span>
#include <vector>

#include "vidseg/fusion.hpp"
#include "vidseg/model.hpp"
#include "vidseg/types.hpp"

namespace vidseg {

/// Wall-clock seconds spent per component on one frame. Components that did
/// not run on a frame stay at zero; feature time is attributed to the frame
/// whose features were computed, even when computed ahead of schedule.
struct FrameCost {
    double feature = 0.0;
    double task = 0.0;
    double warp = 0.0;
    double fusion = 0.0;
    double motion = 0.0;

    double total() const { return feature + task + warp + fusion + motion; }
};

struct StreamResult {
    std::vector<SegMap> segmentations;
    std::vector<FrameCost> per_frame_cost;
    std::vector<bool> keyframe_flags;
    /// Frames of output latency in a streaming setting: interpolation must
    /// wait for the next keyframe, so it reports its interval; the other
    /// schemes report zero. Batch evaluation ignores this.
    int output_delay_frames = 0;
};

/// Compares the frame outputs of two runs: segmentations and keyframe flags.
/// Cost records are wall-clock measurements and never participate.
bool same_outputs(const StreamResult& a, const StreamResult& b);

/// Runs the full model on every frame.
StreamResult run_baseline(std::span<const Frame> frames, const FeatureNetwork& feature_net,
                          const TaskNetwork& task_net);

/// Forward propagation: features are extracted on keyframes (i mod n == 0)
/// and carried to intermediate frames by warping the cached map one step
/// with the motion field as stored, which gathers each cell's content from
/// where it sat one frame earlier. motion[i] must link frame i-1 to frame i;
/// motion[0] is never read.
StreamResult run_prop(std::span<const Frame> frames, std::span<const MotionField> motion,
                      const PipelineConfig& config, const FeatureNetwork& feature_net,
                      const TaskNetwork& task_net);

/// Bi-directional interpolation: each keyframe also precomputes the next
/// keyframe's features, both are chained toward the interval's interior
/// (forward with the fields as stored, backward with negated fields in
/// reverse frame order), and each intermediate frame fuses the pair under
/// alpha_for weighting. Keyframe outputs equal the baseline's. A trailing
/// interval with no closing keyframe falls back to forward propagation.
///
/// `weights` supplies the fusion operator; pass nullptr to derive a
/// parameter-free operator from config.fusion (conv then requires weights).
StreamResult run_inter(std::span<const Frame> frames, std::span<const MotionField> motion,
                       const PipelineConfig& config, const FeatureNetwork& feature_net,
                       const TaskNetwork& task_net, const FusionWeights* weights = nullptr);

/// Dispatches on config.mode.
StreamResult run_scheme(std::span<const Frame> frames, std::span<const MotionField> motion,
                        const PipelineConfig& config, const FeatureNetwork& feature_net,
                        const TaskNetwork& task_net, const FusionWeights* weights = nullptr);

}  // namespace vidseg
