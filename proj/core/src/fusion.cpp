#include "vidseg/fusion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vidseg {

void ConvKernel::validate() const {
    if (channels <= 0) {
        throw std::invalid_argument("ConvKernel: channels must be positive");
    }
    const std::size_t expected = static_cast<std::size_t>(channels) * 2 * channels;
    if (weights.size() != expected) {
        throw std::invalid_argument("ConvKernel: " + std::to_string(weights.size()) +
                                    " weights, expected " + std::to_string(expected));
    }
    if (bias.size() != static_cast<std::size_t>(channels)) {
        throw std::invalid_argument("ConvKernel: " + std::to_string(bias.size()) +
                                    " biases, expected " + std::to_string(channels));
    }
    for (double v : weights) {
        if (!std::isfinite(v)) throw std::invalid_argument("ConvKernel: non-finite weight");
    }
    for (double v : bias) {
        if (!std::isfinite(v)) throw std::invalid_argument("ConvKernel: non-finite bias");
    }
}

FusionWeights FusionWeights::with_kernel(ConvKernel kernel) {
    kernel.validate();
    return {FusionKind::conv, std::move(kernel)};
}

ConvKernel FusionWeights::averaging_kernel(int channels) {
    ConvKernel kernel;
    kernel.channels = channels;
    kernel.weights.assign(static_cast<std::size_t>(channels) * 2 * channels, 0.0);
    kernel.bias.assign(channels, 0.0);
    for (int c = 0; c < channels; ++c) {
        kernel.weights[static_cast<std::size_t>(c) * 2 * channels + c] = 0.5;
        kernel.weights[static_cast<std::size_t>(c) * 2 * channels + channels + c] = 0.5;
    }
    return kernel;
}

Alpha alpha_for(int interval, int offset) {
    if (interval < 2 || offset < 1 || offset > interval - 1) {
        throw std::invalid_argument("alpha_for: offset " + std::to_string(offset) +
                                    " outside [1, " + std::to_string(interval - 1) +
                                    "] for interval " + std::to_string(interval));
    }
    return {static_cast<double>(interval - offset) / interval,
            static_cast<double>(offset) / interval};
}

FeatureMap fuse(const FeatureMap& forward, const FeatureMap& backward, double alpha,
                const FusionWeights& weights) {
    if (!forward.same_shape(backward)) {
        throw std::invalid_argument("fuse: input maps have different shapes");
    }
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::invalid_argument("fuse: alpha must be in [0, 1]");
    }

    const int channels = forward.channels();
    const std::size_t plane = static_cast<std::size_t>(forward.fh()) * forward.fw();
    const double beta = 1.0 - alpha;
    const double* fwd = forward.data().data();
    const double* bwd = backward.data().data();
    std::vector<double> out(static_cast<std::size_t>(channels) * plane);

    switch (weights.kind) {
        case FusionKind::max:
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = std::max(alpha * fwd[i], beta * bwd[i]);
            }
            break;
        case FusionKind::average:
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = (alpha * fwd[i] + beta * bwd[i]) / 2.0;
            }
            break;
        case FusionKind::conv: {
            if (!weights.conv) {
                throw std::invalid_argument("fuse: conv fusion requires a kernel");
            }
            const ConvKernel& k = *weights.conv;
            k.validate();
            if (k.channels != channels) {
                throw std::invalid_argument("fuse: kernel is for " + std::to_string(k.channels) +
                                            " channels, maps have " + std::to_string(channels));
            }
            for (std::size_t i = 0; i < plane; ++i) {
                for (int c = 0; c < channels; ++c) {
                    const double* row = k.weights.data() + static_cast<std::size_t>(c) * 2 * channels;
                    double acc = k.bias[c];
                    for (int j = 0; j < channels; ++j) {
                        acc += row[j] * (alpha * fwd[j * plane + i]);
                        acc += row[channels + j] * (beta * bwd[j * plane + i]);
                    }
                    out[c * plane + i] = acc;
                }
            }
            break;
        }
    }
    return FeatureMap(channels, forward.fh(), forward.fw(), forward.stride(), std::move(out));
}

FitResult fit_conv_fusion(std::span<const FitSample> samples, const FitConfig& config) {
    if (samples.empty()) {
        throw std::invalid_argument("fit_conv_fusion: need at least one sample");
    }
    if (config.alpha < 0.0 || config.alpha > 1.0) {
        throw std::invalid_argument("fit_conv_fusion: alpha must be in [0, 1]");
    }

    const FeatureMap& first = samples[0].forward;
    const int channels = first.channels();
    std::size_t rows = 0;
    for (const FitSample& s : samples) {
        if (!s.forward.same_shape(first) || !s.backward.same_shape(first) ||
            !s.target.same_shape(first)) {
            throw std::invalid_argument("fit_conv_fusion: samples have inconsistent shapes");
        }
        rows += static_cast<std::size_t>(s.forward.fh()) * s.forward.fw();
    }

    // One regression row per pixel: the 2C pre-weighted inputs plus a bias
    // column; one target column per output channel.
    const int cols = 2 * channels + 1;
    Eigen::MatrixXd x(rows, cols);
    Eigen::MatrixXd y(rows, channels);
    std::size_t row = 0;
    for (const FitSample& s : samples) {
        const double alpha = s.alpha.value_or(config.alpha);
        if (alpha < 0.0 || alpha > 1.0) {
            throw std::invalid_argument("fit_conv_fusion: sample alpha must be in [0, 1]");
        }
        const double beta = 1.0 - alpha;
        const std::size_t plane = static_cast<std::size_t>(s.forward.fh()) * s.forward.fw();
        const double* fwd = s.forward.data().data();
        const double* bwd = s.backward.data().data();
        const double* tgt = s.target.data().data();
        for (std::size_t i = 0; i < plane; ++i, ++row) {
            for (int c = 0; c < channels; ++c) {
                x(row, c) = alpha * fwd[c * plane + i];
                x(row, channels + c) = beta * bwd[c * plane + i];
                y(row, c) = tgt[c * plane + i];
            }
            x(row, 2 * channels) = 1.0;
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(config.rank_tolerance);
    const Eigen::MatrixXd solution = svd.solve(y);

    FitResult result;
    result.rank_deficient = svd.rank() < cols;

    ConvKernel kernel;
    kernel.channels = channels;
    kernel.weights.resize(static_cast<std::size_t>(channels) * 2 * channels);
    kernel.bias.resize(channels);
    for (int c = 0; c < channels; ++c) {
        for (int j = 0; j < 2 * channels; ++j) {
            kernel.weights[static_cast<std::size_t>(c) * 2 * channels + j] = solution(j, c);
        }
        kernel.bias[c] = solution(2 * channels, c);
    }
    result.weights = FusionWeights::with_kernel(std::move(kernel));
    result.residual_mse = (x * solution - y).squaredNorm() / (static_cast<double>(rows) * channels);
    return result;
}

}  // namespace vidseg
