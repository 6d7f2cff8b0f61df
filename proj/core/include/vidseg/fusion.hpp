#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vidseg/types.hpp"

namespace vidseg {

/// Learned 1x1 channel-mixing layer: maps the 2C stacked input channels down
/// to C output channels. weights is row-major, channels rows by 2*channels
/// columns; bias has channels entries.
struct ConvKernel {
    int channels = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    /// Throws std::invalid_argument if the shapes are inconsistent.
    void validate() const;
};

struct FusionWeights {
    FusionKind kind = FusionKind::average;
    std::optional<ConvKernel> conv;

    static FusionWeights averaging() { return {FusionKind::average, std::nullopt}; }
    static FusionWeights maximum() { return {FusionKind::max, std::nullopt}; }
    static FusionWeights with_kernel(ConvKernel kernel);

    /// Conv weights that exactly reproduce average fusion:
    /// each output channel takes 0.5 of its forward copy and 0.5 of its
    /// backward copy, zero bias.
    static ConvKernel averaging_kernel(int channels);
};

/// Relevance weights for a frame at offset p inside a keyframe interval n:
/// forward = (n - p) / n, backward = p / n. The two components sum to
/// exactly 1. Requires 1 <= p <= n - 1.
struct Alpha {
    double forward;
    double backward;
};
Alpha alpha_for(int interval, int offset);

/// Fuses a forward-warped and a backward-warped feature map. The inputs are
/// scaled first (a = alpha * forward, b = (1 - alpha) * backward), then
/// combined per the kind: elementwise max(a, b), (a + b) / 2, or the 1x1
/// conv applied to the 2C-channel stack [a; b].
FeatureMap fuse(const FeatureMap& forward, const FeatureMap& backward, double alpha,
                const FusionWeights& weights);

struct FitSample {
    FeatureMap forward;
    FeatureMap backward;
    FeatureMap target;
    /// Per-sample relevance weight; samples without one use FitConfig::alpha.
    std::optional<double> alpha;
};

struct FitConfig {
    /// Relevance weight applied to samples that carry none of their own.
    double alpha = 0.5;
    /// Relative singular-value cutoff for rank detection.
    double rank_tolerance = 1e-10;
};

struct FitResult {
    FusionWeights weights;
    double residual_mse = 0.0;
    /// Set when the regression matrix was rank-deficient; the returned
    /// kernel is then the minimum-norm solution.
    bool rank_deficient = false;
};

/// Fits conv-fusion weights by linear least squares: every pixel of every
/// sample contributes one regression row over the 2C stacked (pre-weighted)
/// inputs plus a bias term, solved per output channel.
FitResult fit_conv_fusion(std::span<const FitSample> samples, const FitConfig& config = {});

}  // namespace vidseg
