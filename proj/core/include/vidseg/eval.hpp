#pragma once

#include <span>
#include <vector>

#include "vidseg/model.hpp"
#include "vidseg/pipeline.hpp"
#include "vidseg/scene.hpp"
#include "vidseg/types.hpp"

namespace vidseg {

struct MiouResult {
    /// Per-class IoU; meaningful only where present[c] is true.
    std::vector<double> per_class;
    /// True when class c appears in the predictions or the ground truth.
    /// Classes absent from both are excluded from the mean.
    std::vector<bool> present;
    double mean = 0.0;
};

/// Mean intersection-over-union over aligned prediction/ground-truth pairs,
/// aggregated across all frames. Ground-truth pixels labeled kIgnoreLabel
/// are excluded. Throws when no valid pixel exists or dimensions mismatch.
MiouResult miou(std::span<const SegMap> preds, std::span<const SegMap> gts, int num_classes);

/// mIoU per keyframe offset: frames are grouped by index mod interval and
/// each group is aggregated separately. Entry 0 covers keyframes.
std::vector<double> per_offset_miou(std::span<const SegMap> preds, std::span<const SegMap> gts,
                                    int num_classes, int interval);

/// Smallest entry of a per-offset accuracy vector; the worst distance from
/// a keyframe. Throws on an empty input.
double min_accuracy(std::span<const double> per_offset);

/// One row of a keyframe-interval sweep. Accuracies are percentages.
struct IntervalReport {
    SchemeMode scheme = SchemeMode::baseline;
    int interval = 1;
    double miou_avg = 0.0;
    double miou_min = 0.0;
    double fps = 0.0;
    std::vector<double> per_offset;
};

struct SweepOptions {
    std::vector<int> intervals{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<SchemeMode> schemes{SchemeMode::baseline, SchemeMode::prop, SchemeMode::inter};
    FusionKind fusion = FusionKind::average;
    /// Timed stream repetitions after one warmup; the median is reported.
    int repetitions = 3;
    /// Count motion estimation toward throughput. Off by default: extracting
    /// block motion is a by-product of video compression, not of inference.
    bool include_motion_cost = false;
    int search_radius = 8;
    int workers = 1;
};

/// Runs every (scheme, interval) pair over the scene against its ground
/// truth, reporting accuracy and measured throughput. Motion fields are
/// estimated once from the frames and shared across schemes.
std::vector<IntervalReport> sweep(const SyntheticScene& scene, const SweepOptions& options,
                                  const FeatureNetwork& feature_net, const TaskNetwork& task_net);

/// Per-offset accuracy of the two chain directions and their fusions at one
/// interval, mirroring a fusion ablation: index p in [1, n-1] holds the mIoU
/// percentage over frames at offset p, aggregated across complete intervals.
struct FusionBreakdown {
    int interval = 0;
    std::vector<double> forward_only;   // [n], entry 0 unused
    std::vector<double> backward_only;  // [n], entry 0 unused
    std::vector<double> max_fusion;
    std::vector<double> average_fusion;
    std::vector<double> conv_fusion;
};

/// Evaluates forward-only, backward-only, and fused features per offset.
/// Conv weights are fit on the scene itself against baseline features.
FusionBreakdown fusion_breakdown(const SyntheticScene& scene, int interval,
                                 const FeatureNetwork& feature_net, const TaskNetwork& task_net,
                                 int search_radius = 8);

/// Per-frame component times, seconds, for the analytic throughput model.
struct CostInputs {
    double feature = 0.0;
    double warp = 0.0;
    double task = 0.0;
    double flow = 0.0;
    double fusion = 0.0;
};

struct ThroughputPrediction {
    double baseline_fps = 0.0;
    double prop_flow_fps = 0.0;
    double prop_bmv_fps = 0.0;
    double inter_bmv_fps = 0.0;
    /// Cost of one intermediate frame under each propagation scheme.
    double prop_flow_intermediate = 0.0;
    double prop_bmv_intermediate = 0.0;
    double inter_bmv_intermediate = 0.0;
};

/// Steady-state throughput for each scheme at the given keyframe interval:
/// a keyframe costs feature + task; intermediate frames cost warp + task
/// (plus flow for optical-flow propagation; interpolation pays two warps
/// and a fusion). As intermediate cost falls to zero the speedup over the
/// baseline approaches the interval itself.
ThroughputPrediction throughput_model(const CostInputs& costs, int interval);

}  // namespace vidseg
