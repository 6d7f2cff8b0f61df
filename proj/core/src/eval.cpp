#include "vidseg/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "vidseg/fusion.hpp"
#include "vidseg/motion.hpp"
#include "vidseg/warp.hpp"

namespace vidseg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_num_classes(int num_classes) {
    if (num_classes < 1 || num_classes > 255) {
        throw std::invalid_argument("miou: num_classes must be in [1, 255]");
    }
}

// Running per-class intersection/union counts, aggregated across frames.
struct Confusion {
    std::vector<std::uint64_t> tp;
    std::vector<std::uint64_t> fp;
    std::vector<std::uint64_t> fn;
    std::uint64_t valid_pixels = 0;

    explicit Confusion(int num_classes) : tp(num_classes), fp(num_classes), fn(num_classes) {}

    void add(const SegMap& pred, const SegMap& gt) {
        if (pred.width() != gt.width() || pred.height() != gt.height()) {
            throw std::invalid_argument("miou: prediction is " + std::to_string(pred.width()) +
                                        "x" + std::to_string(pred.height()) +
                                        " but ground truth is " + std::to_string(gt.width()) +
                                        "x" + std::to_string(gt.height()));
        }
        const int num_classes = static_cast<int>(tp.size());
        const std::vector<std::uint8_t>& p = pred.labels();
        const std::vector<std::uint8_t>& g = gt.labels();
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] == kIgnoreLabel) continue;
            if (g[i] >= num_classes || p[i] >= num_classes) {
                throw std::invalid_argument("miou: label outside [0, " +
                                            std::to_string(num_classes - 1) + "]");
            }
            ++valid_pixels;
            if (p[i] == g[i]) {
                ++tp[p[i]];
            } else {
                ++fp[p[i]];
                ++fn[g[i]];
            }
        }
    }

    MiouResult finalize() const {
        if (valid_pixels == 0) {
            throw std::invalid_argument("miou: no valid pixels to score");
        }
        MiouResult result;
        result.per_class.assign(tp.size(), 0.0);
        result.present.assign(tp.size(), false);
        double sum = 0.0;
        int count = 0;
        for (std::size_t c = 0; c < tp.size(); ++c) {
            const std::uint64_t denom = tp[c] + fp[c] + fn[c];
            if (denom == 0) continue;
            result.present[c] = true;
            result.per_class[c] = static_cast<double>(tp[c]) / static_cast<double>(denom);
            sum += result.per_class[c];
            ++count;
        }
        result.mean = sum / count;
        return result;
    }
};

void check_pairs(std::span<const SegMap> preds, std::span<const SegMap> gts) {
    if (preds.size() != gts.size()) {
        throw std::invalid_argument("miou: " + std::to_string(preds.size()) +
                                    " predictions vs " + std::to_string(gts.size()) +
                                    " ground-truth maps");
    }
    if (preds.empty()) {
        throw std::invalid_argument("miou: no frames to score");
    }
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

}  // namespace

MiouResult miou(std::span<const SegMap> preds, std::span<const SegMap> gts, int num_classes) {
    check_num_classes(num_classes);
    check_pairs(preds, gts);
    Confusion confusion(num_classes);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        confusion.add(preds[i], gts[i]);
    }
    return confusion.finalize();
}

std::vector<double> per_offset_miou(std::span<const SegMap> preds, std::span<const SegMap> gts,
                                    int num_classes, int interval) {
    check_num_classes(num_classes);
    check_pairs(preds, gts);
    if (interval < 1) {
        throw std::invalid_argument("per_offset_miou: interval must be at least 1");
    }
    if (preds.size() < static_cast<std::size_t>(interval)) {
        throw std::invalid_argument("per_offset_miou: " + std::to_string(preds.size()) +
                                    " frames cannot cover " + std::to_string(interval) +
                                    " offsets");
    }
    std::vector<Confusion> groups(interval, Confusion(num_classes));
    for (std::size_t i = 0; i < preds.size(); ++i) {
        groups[i % interval].add(preds[i], gts[i]);
    }
    std::vector<double> result;
    result.reserve(groups.size());
    for (const Confusion& group : groups) {
        result.push_back(group.finalize().mean);
    }
    return result;
}

double min_accuracy(std::span<const double> per_offset) {
    if (per_offset.empty()) {
        throw std::invalid_argument("min_accuracy: empty accuracy list");
    }
    return *std::min_element(per_offset.begin(), per_offset.end());
}

std::vector<IntervalReport> sweep(const SyntheticScene& scene, const SweepOptions& options,
                                  const FeatureNetwork& feature_net, const TaskNetwork& task_net) {
    const std::span<const Frame> frames = scene.frames;
    const std::span<const SegMap> gts = scene.ground_truth;
    if (frames.empty() || frames.size() != gts.size()) {
        throw std::invalid_argument("sweep: scene needs matching frames and ground truth");
    }
    if (options.repetitions < 1) {
        throw std::invalid_argument("sweep: repetitions must be at least 1");
    }
    if (options.schemes.empty() || options.intervals.empty()) {
        throw std::invalid_argument("sweep: schemes and intervals must be non-empty");
    }
    for (int n : options.intervals) {
        if (n < 1) throw std::invalid_argument("sweep: intervals must be at least 1");
    }
    const int num_classes = task_net.num_classes();

    const bool needs_motion =
        std::any_of(options.schemes.begin(), options.schemes.end(),
                    [](SchemeMode m) { return m != SchemeMode::baseline; });
    std::vector<MotionField> motion;
    double motion_seconds = 0.0;
    if (needs_motion) {
        const auto start = Clock::now();
        motion = estimate_stream_motion(frames, {kDefaultBlockSize, options.search_radius},
                                        options.workers);
        motion_seconds = seconds_since(start);
    }

    std::vector<IntervalReport> reports;
    for (SchemeMode scheme : options.schemes) {
        // The baseline has no keyframe interval; one row covers it.
        const std::vector<int> intervals =
            scheme == SchemeMode::baseline ? std::vector<int>{1} : options.intervals;
        for (int interval : intervals) {
            PipelineConfig config;
            config.keyframe_interval = interval;
            config.fusion = options.fusion;
            config.mode = scheme;
            config.num_classes = num_classes;
            config.search_radius = options.search_radius;

            // Warmup run doubles as the accuracy source; outputs are
            // deterministic, so repeated runs only matter for timing.
            const StreamResult out = run_scheme(frames, motion, config, feature_net, task_net);

            std::vector<double> times;
            times.reserve(options.repetitions);
            for (int rep = 0; rep < options.repetitions; ++rep) {
                const auto start = Clock::now();
                run_scheme(frames, motion, config, feature_net, task_net);
                times.push_back(seconds_since(start));
            }
            double stream_seconds = median(std::move(times));
            if (options.include_motion_cost && scheme != SchemeMode::baseline) {
                stream_seconds += motion_seconds;
            }

            IntervalReport report;
            report.scheme = scheme;
            report.interval = interval;
            report.per_offset = per_offset_miou(out.segmentations, gts, num_classes, interval);
            for (double& v : report.per_offset) v *= 100.0;
            report.miou_avg = miou(out.segmentations, gts, num_classes).mean * 100.0;
            report.miou_min = min_accuracy(report.per_offset);
            report.fps = static_cast<double>(frames.size()) / stream_seconds;
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

FusionBreakdown fusion_breakdown(const SyntheticScene& scene, int interval,
                                 const FeatureNetwork& feature_net, const TaskNetwork& task_net,
                                 int search_radius) {
    const std::span<const Frame> frames = scene.frames;
    const std::span<const SegMap> gts = scene.ground_truth;
    const int n = interval;
    if (n < 2) {
        throw std::invalid_argument("fusion_breakdown: interval must be at least 2");
    }
    if (frames.size() != gts.size()) {
        throw std::invalid_argument("fusion_breakdown: frames and ground truth differ in length");
    }
    if (frames.size() < static_cast<std::size_t>(n) + 1) {
        throw std::invalid_argument("fusion_breakdown: needs at least one complete interval (" +
                                    std::to_string(n + 1) + " frames)");
    }
    const int num_classes = task_net.num_classes();
    const int stride = feature_net.stride();
    const int width = frames[0].width();
    const int height = frames[0].height();

    const std::vector<MotionField> motion =
        estimate_stream_motion(frames, {kDefaultBlockSize, search_radius});

    std::vector<FeatureMap> base;
    base.reserve(frames.size());
    for (const Frame& frame : frames) base.push_back(feature_net.extract(frame));

    // Chains over every complete interval, grouped by offset.
    struct OffsetSamples {
        std::vector<FeatureMap> forward;
        std::vector<FeatureMap> backward;
        std::vector<std::size_t> frame;
    };
    std::vector<OffsetSamples> offsets(n);

    for (std::size_t k = 0; k + n < frames.size(); k += n) {
        FeatureMap fwd = base[k];
        FeatureMap bwd = base[k + n];
        std::vector<FeatureMap> fwd_chain;
        std::vector<FeatureMap> bwd_chain;
        for (int p = 1; p <= n - 1; ++p) {
            fwd = bilinear_warp(fwd, to_warp_field(motion[k + p], stride));
            fwd_chain.push_back(fwd);
            // Step p carries the closing keyframe's features from frame
            // k+n-p+1 back to k+n-p, against the negation of the crossed
            // transition's stored field.
            bwd = bilinear_warp(bwd, to_warp_field(negate(motion[k + n - p + 1]), stride));
            bwd_chain.push_back(bwd);
        }
        for (int p = 1; p <= n - 1; ++p) {
            offsets[p].forward.push_back(fwd_chain[p - 1]);
            offsets[p].backward.push_back(bwd_chain[n - p - 1]);
            offsets[p].frame.push_back(k + p);
        }
    }

    // One conv kernel shared across offsets, fit against the features the
    // full model would have produced on each intermediate frame.
    std::vector<FitSample> fit_samples;
    for (int p = 1; p <= n - 1; ++p) {
        const OffsetSamples& group = offsets[p];
        const double alpha = alpha_for(n, p).forward;
        for (std::size_t i = 0; i < group.frame.size(); ++i) {
            fit_samples.push_back(
                {group.forward[i], group.backward[i], base[group.frame[i]], alpha});
        }
    }
    const FusionWeights conv_weights = fit_conv_fusion(fit_samples).weights;
    const FusionWeights max_weights = FusionWeights::maximum();
    const FusionWeights avg_weights = FusionWeights::averaging();

    FusionBreakdown out;
    out.interval = n;
    out.forward_only.assign(n, 0.0);
    out.backward_only.assign(n, 0.0);
    out.max_fusion.assign(n, 0.0);
    out.average_fusion.assign(n, 0.0);
    out.conv_fusion.assign(n, 0.0);

    for (int p = 1; p <= n - 1; ++p) {
        const OffsetSamples& group = offsets[p];
        const double alpha = alpha_for(n, p).forward;
        const auto score = [&](const auto& features_for) {
            Confusion confusion(num_classes);
            for (std::size_t i = 0; i < group.frame.size(); ++i) {
                const SegMap seg = task_net.segment(features_for(i), width, height);
                confusion.add(seg, gts[group.frame[i]]);
            }
            return confusion.finalize().mean * 100.0;
        };
        out.forward_only[p] = score([&](std::size_t i) -> const FeatureMap& {
            return group.forward[i];
        });
        out.backward_only[p] = score([&](std::size_t i) -> const FeatureMap& {
            return group.backward[i];
        });
        out.max_fusion[p] = score([&](std::size_t i) {
            return fuse(group.forward[i], group.backward[i], alpha, max_weights);
        });
        out.average_fusion[p] = score([&](std::size_t i) {
            return fuse(group.forward[i], group.backward[i], alpha, avg_weights);
        });
        out.conv_fusion[p] = score([&](std::size_t i) {
            return fuse(group.forward[i], group.backward[i], alpha, conv_weights);
        });
    }
    return out;
}

ThroughputPrediction throughput_model(const CostInputs& costs, int interval) {
    if (interval < 1) {
        throw std::invalid_argument("throughput_model: interval must be at least 1");
    }
    for (double v : {costs.feature, costs.warp, costs.task, costs.flow, costs.fusion}) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("throughput_model: costs must be finite and >= 0");
        }
    }
    const double keyframe = costs.feature + costs.task;
    if (keyframe <= 0.0) {
        throw std::invalid_argument("throughput_model: keyframe cost must be positive");
    }

    ThroughputPrediction p;
    p.baseline_fps = 1.0 / keyframe;
    p.prop_flow_intermediate = costs.flow + costs.warp + costs.task;
    p.prop_bmv_intermediate = costs.warp + costs.task;
    p.inter_bmv_intermediate = 2.0 * costs.warp + costs.fusion + costs.task;

    const double n = interval;
    p.prop_flow_fps = n / (keyframe + (n - 1) * p.prop_flow_intermediate);
    p.prop_bmv_fps = n / (keyframe + (n - 1) * p.prop_bmv_intermediate);
    p.inter_bmv_fps = n / (keyframe + (n - 1) * p.inter_bmv_intermediate);
    return p;
}

}  // namespace vidseg
