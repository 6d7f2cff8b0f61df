#include "vidseg/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace vidseg {

namespace {

int luma_bin(double luma01) {
    return std::min(2, static_cast<int>(luma01 * 3.0));
}

}  // namespace

FeatureMap toy_features(const Frame& frame) {
    const int w = frame.width();
    const int h = frame.height();
    if (w < kFeatureStride || h < kFeatureStride) {
        throw std::invalid_argument("toy_features: frame must be at least 16x16, got " +
                                    std::to_string(w) + "x" + std::to_string(h));
    }
    const int fw = (w + kFeatureStride - 1) / kFeatureStride;
    const int fh = (h + kFeatureStride - 1) / kFeatureStride;
    const std::size_t plane = static_cast<std::size_t>(fh) * fw;
    std::vector<double> data(kToyChannels * plane);

    for (int cy = 0; cy < fh; ++cy) {
        const int y0 = cy * kFeatureStride;
        const int eh = std::min(kFeatureStride, h - y0);
        for (int cx = 0; cx < fw; ++cx) {
            const int x0 = cx * kFeatureStride;
            const int ew = std::min(kFeatureStride, w - x0);
            const int npix = ew * eh;

            double sum_r = 0.0, sum_g = 0.0, sum_b = 0.0;
            int hist[3] = {0, 0, 0};
            double grad_x = 0.0, grad_y = 0.0;
            const int half_x = (ew + 1) / 2;
            const int half_y = (eh + 1) / 2;
            double quad[4] = {0.0, 0.0, 0.0, 0.0};
            int quad_n[4] = {0, 0, 0, 0};

            for (int y = 0; y < eh; ++y) {
                for (int x = 0; x < ew; ++x) {
                    const int px = x0 + x;
                    const int py = y0 + y;
                    sum_r += frame.channel(px, py, 0);
                    sum_g += frame.channel(px, py, 1);
                    sum_b += frame.channel(px, py, 2);
                    const double luma = frame.luma(px, py) / 255.0;
                    ++hist[luma_bin(luma)];
                    if (x + 1 < ew) {
                        grad_x += std::abs(frame.luma(px + 1, py) / 255.0 - luma);
                    }
                    if (y + 1 < eh) {
                        grad_y += std::abs(frame.luma(px, py + 1) / 255.0 - luma);
                    }
                    const int q = (y < half_y ? 0 : 2) + (x < half_x ? 0 : 1);
                    quad[q] += luma;
                    ++quad_n[q];
                }
            }

            const std::size_t cell = static_cast<std::size_t>(cy) * fw + cx;
            double desc[kToyChannels];
            desc[0] = sum_r / (255.0 * npix);
            desc[1] = sum_g / (255.0 * npix);
            desc[2] = sum_b / (255.0 * npix);
            desc[3] = static_cast<double>(hist[0]) / npix;
            desc[4] = static_cast<double>(hist[1]) / npix;
            desc[5] = static_cast<double>(hist[2]) / npix;
            const int pairs_x = (ew - 1) * eh;
            const int pairs_y = ew * (eh - 1);
            desc[6] = pairs_x > 0 ? grad_x / pairs_x : 0.0;
            desc[7] = pairs_y > 0 ? grad_y / pairs_y : 0.0;
            for (int q = 0; q < 4; ++q) {
                desc[8 + q] = quad_n[q] > 0 ? quad[q] / quad_n[q] : 0.0;
            }
            for (int c = 0; c < kToyChannels; ++c) {
                data[c * plane + cell] = desc[c];
            }
        }
    }
    return FeatureMap(kToyChannels, fh, fw, kFeatureStride, std::move(data));
}

ToyModel::ToyModel(std::vector<double> centroids, int num_classes, int channels)
    : centroids_(std::move(centroids)), num_classes_(num_classes), channels_(channels) {
    if (num_classes_ < 1 || num_classes_ > 255) {
        throw std::invalid_argument("ToyModel: num_classes must be in [1, 255]");
    }
    if (channels_ < 1) {
        throw std::invalid_argument("ToyModel: channels must be positive");
    }
    const std::size_t expected = static_cast<std::size_t>(num_classes_) * channels_;
    if (centroids_.size() != expected) {
        throw std::invalid_argument("ToyModel: " + std::to_string(centroids_.size()) +
                                    " centroid values, expected " + std::to_string(expected));
    }
    for (double v : centroids_) {
        if (!std::isfinite(v)) throw std::invalid_argument("ToyModel: non-finite centroid");
    }
    for (int a = 0; a < num_classes_; ++a) {
        for (int b = a + 1; b < num_classes_; ++b) {
            bool distinct = false;
            for (int c = 0; c < channels_ && !distinct; ++c) {
                distinct = centroid(a, c) != centroid(b, c);
            }
            if (!distinct) {
                throw std::invalid_argument("ToyModel: centroids " + std::to_string(a) + " and " +
                                            std::to_string(b) + " coincide");
            }
        }
    }
}

ToyModel ToyModel::random(int num_classes, unsigned seed, int channels) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> centroids(static_cast<std::size_t>(num_classes) * channels);
    for (double& v : centroids) v = unit(rng);
    return ToyModel(std::move(centroids), num_classes, channels);
}

ToyModel ToyModel::from_colors(std::span<const std::array<std::uint8_t, 3>> colors) {
    if (colors.empty()) {
        throw std::invalid_argument("ToyModel: palette must not be empty");
    }
    std::vector<double> centroids;
    centroids.reserve(colors.size() * kToyChannels);
    for (const auto& rgb : colors) {
        const double luma = (0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]) / 255.0;
        double desc[kToyChannels] = {};
        desc[0] = rgb[0] / 255.0;
        desc[1] = rgb[1] / 255.0;
        desc[2] = rgb[2] / 255.0;
        desc[3 + luma_bin(luma)] = 1.0;
        desc[6] = 0.0;
        desc[7] = 0.0;
        for (int q = 0; q < 4; ++q) desc[8 + q] = luma;

        // Scaled to unit norm. With equal-norm centroids, squared-distance
        // classification depends only on feature direction, so the labels
        // survive the uniform down-scaling the weighted fusion stage applies
        // to its inputs.
        double norm = 0.0;
        for (double v : desc) norm += v * v;
        norm = std::sqrt(norm);
        if (norm <= 0.0) {
            throw std::invalid_argument("ToyModel: palette color produced a zero descriptor");
        }
        for (double& v : desc) v /= norm;
        centroids.insert(centroids.end(), desc, desc + kToyChannels);
    }
    try {
        return ToyModel(std::move(centroids), static_cast<int>(colors.size()), kToyChannels);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument(
            "ToyModel: palette contains colors indistinguishable by feature direction");
    }
}

SegMap toy_task(const FeatureMap& f, const ToyModel& model, int out_width, int out_height) {
    if (f.channels() != model.channels()) {
        throw std::invalid_argument("toy_task: map has " + std::to_string(f.channels()) +
                                    " channels, model expects " +
                                    std::to_string(model.channels()));
    }
    const int stride = f.stride();
    if ((out_width + stride - 1) / stride != f.fw() ||
        (out_height + stride - 1) / stride != f.fh()) {
        throw std::invalid_argument("toy_task: output " + std::to_string(out_width) + "x" +
                                    std::to_string(out_height) + " incompatible with a " +
                                    std::to_string(f.fw()) + "x" + std::to_string(f.fh()) +
                                    " map at stride " + std::to_string(stride));
    }

    const int fh = f.fh();
    const int fw = f.fw();
    const std::size_t plane = static_cast<std::size_t>(fh) * fw;

    std::vector<std::uint8_t> cell_labels(plane);
    for (std::size_t cell = 0; cell < plane; ++cell) {
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int cls = 0; cls < model.num_classes(); ++cls) {
            double dist = 0.0;
            for (int c = 0; c < model.channels(); ++c) {
                const double d = f.data()[c * plane + cell] - model.centroid(cls, c);
                dist += d * d;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = cls;
            }
        }
        cell_labels[cell] = static_cast<std::uint8_t>(best);
    }

    // Expand each cell row once, then replicate it down its stride band.
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(out_width) * out_height);
    for (int cy = 0; cy < fh; ++cy) {
        const int y0 = cy * stride;
        if (y0 >= out_height) break;
        const std::uint8_t* cell_row = cell_labels.data() + static_cast<std::size_t>(cy) * fw;
        std::uint8_t* first_row = labels.data() + static_cast<std::size_t>(y0) * out_width;
        for (int cx = 0; cx < fw; ++cx) {
            const int x0 = cx * stride;
            if (x0 >= out_width) break;
            std::fill_n(first_row + x0, std::min(stride, out_width - x0), cell_row[cx]);
        }
        for (int y = y0 + 1; y < std::min(y0 + stride, out_height); ++y) {
            std::copy_n(first_row, out_width, labels.data() + static_cast<std::size_t>(y) * out_width);
        }
    }
    return SegMap(out_width, out_height, std::move(labels), model.num_classes());
}

}  // namespace vidseg
