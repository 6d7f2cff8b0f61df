#include "vidseg/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vidseg {

namespace {

void require(bool cond, const std::string& message) {
    if (!cond) {
        throw std::invalid_argument(message);
    }
}

}  // namespace

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels, int index)
    : width_(width), height_(height), index_(index), pixels_(std::move(pixels)) {
    require(width_ > 0 && height_ > 0,
            "Frame: dimensions must be positive, got " + std::to_string(width_) + "x" +
                std::to_string(height_));
    require(index_ >= 0, "Frame: index must be non-negative");
    const std::size_t expected = static_cast<std::size_t>(width_) * height_ * 3;
    require(pixels_.size() == expected,
            "Frame: pixel buffer holds " + std::to_string(pixels_.size()) + " bytes, expected " +
                std::to_string(expected));
}

Frame Frame::filled(int width, int height, std::array<std::uint8_t, 3> rgb, int index) {
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = rgb[0];
        pixels[i + 1] = rgb[1];
        pixels[i + 2] = rgb[2];
    }
    return Frame(width, height, std::move(pixels), index);
}

MotionField::MotionField(int grid_w, int grid_h, int block_size, std::vector<Vec2> vectors)
    : grid_w_(grid_w), grid_h_(grid_h), block_size_(block_size), vectors_(std::move(vectors)) {
    require(grid_w_ > 0 && grid_h_ > 0,
            "MotionField: grid dimensions must be positive, got " + std::to_string(grid_w_) +
                "x" + std::to_string(grid_h_));
    require(block_size_ >= 1, "MotionField: block_size must be >= 1");
    const std::size_t expected = static_cast<std::size_t>(grid_w_) * grid_h_;
    require(vectors_.size() == expected,
            "MotionField: " + std::to_string(vectors_.size()) + " vectors for a " +
                std::to_string(grid_w_) + "x" + std::to_string(grid_h_) + " grid");
}

MotionField MotionField::zero(int grid_w, int grid_h, int block_size) {
    return MotionField(grid_w, grid_h, block_size,
                       std::vector<Vec2>(static_cast<std::size_t>(grid_w) * grid_h));
}

MotionField MotionField::zero_for_frame(int frame_w, int frame_h, int block_size) {
    require(frame_w > 0 && frame_h > 0 && block_size >= 1,
            "MotionField: frame dimensions and block size must be positive");
    const int gw = (frame_w + block_size - 1) / block_size;
    const int gh = (frame_h + block_size - 1) / block_size;
    return zero(gw, gh, block_size);
}

FeatureMap::FeatureMap(int channels, int fh, int fw, int stride, std::vector<double> data)
    : channels_(channels), fh_(fh), fw_(fw), stride_(stride), data_(std::move(data)) {
    require(channels_ > 0 && fh_ > 0 && fw_ > 0,
            "FeatureMap: dimensions must be positive, got " + std::to_string(channels_) + "x" +
                std::to_string(fh_) + "x" + std::to_string(fw_));
    require(stride_ > 0, "FeatureMap: stride must be positive");
    const std::size_t expected = static_cast<std::size_t>(channels_) * fh_ * fw_;
    require(data_.size() == expected,
            "FeatureMap: " + std::to_string(data_.size()) + " values for a " +
                std::to_string(channels_) + "x" + std::to_string(fh_) + "x" +
                std::to_string(fw_) + " map");
    // Branchless scan first so the hot path vectorizes; diagnose on failure.
    bool finite = true;
    for (double v : data_) finite &= std::isfinite(v);
    if (!finite) {
        throw std::invalid_argument("FeatureMap: all values must be finite");
    }
}

FeatureMap FeatureMap::zeros(int channels, int fh, int fw, int stride) {
    return FeatureMap(channels, fh, fw, stride,
                      std::vector<double>(static_cast<std::size_t>(channels) * fh * fw));
}

WarpField::WarpField(int fh, int fw, std::vector<Vec2> offsets)
    : fh_(fh), fw_(fw), offsets_(std::move(offsets)) {
    require(fh_ > 0 && fw_ > 0, "WarpField: dimensions must be positive");
    const std::size_t expected = static_cast<std::size_t>(fh_) * fw_;
    require(offsets_.size() == expected,
            "WarpField: " + std::to_string(offsets_.size()) + " offsets for a " +
                std::to_string(fw_) + "x" + std::to_string(fh_) + " grid");
}

WarpField WarpField::zero(int fh, int fw) {
    return WarpField(fh, fw, std::vector<Vec2>(static_cast<std::size_t>(fh) * fw));
}

SegMap::SegMap(int width, int height, std::vector<std::uint8_t> labels, int num_classes)
    : width_(width), height_(height), labels_(std::move(labels)) {
    require(width_ > 0 && height_ > 0, "SegMap: dimensions must be positive");
    require(num_classes >= 1 && num_classes <= 255,
            "SegMap: num_classes must be in [1, 255], got " + std::to_string(num_classes));
    const std::size_t expected = static_cast<std::size_t>(width_) * height_;
    require(labels_.size() == expected,
            "SegMap: " + std::to_string(labels_.size()) + " labels for a " +
                std::to_string(width_) + "x" + std::to_string(height_) + " map");
    // Branchless byte-wide scan first so the hot path vectorizes; diagnose
    // on failure.
    const auto max_class = static_cast<std::uint8_t>(num_classes);
    std::uint8_t bad = 0;
    for (std::uint8_t label : labels_) {
        bad |= static_cast<std::uint8_t>((label >= max_class) & (label != kIgnoreLabel));
    }
    if (bad) {
        for (std::uint8_t label : labels_) {
            if (label != kIgnoreLabel && label >= num_classes) {
                throw std::invalid_argument("SegMap: label " + std::to_string(label) +
                                            " outside [0, " + std::to_string(num_classes) + ")");
            }
        }
    }
}

const char* to_string(FusionKind kind) {
    switch (kind) {
        case FusionKind::max: return "max";
        case FusionKind::average: return "average";
        case FusionKind::conv: return "conv";
    }
    return "?";
}

const char* to_string(SchemeMode mode) {
    switch (mode) {
        case SchemeMode::baseline: return "baseline";
        case SchemeMode::prop: return "prop";
        case SchemeMode::inter: return "inter";
    }
    return "?";
}

void PipelineConfig::validate() const {
    require(keyframe_interval >= 1, "PipelineConfig: keyframe_interval must be >= 1");
    require(search_radius >= 0, "PipelineConfig: search_radius must be >= 0");
    require(num_classes >= 0 && num_classes <= 255,
            "PipelineConfig: num_classes must be in [0, 255]");
}

}  // namespace vidseg
