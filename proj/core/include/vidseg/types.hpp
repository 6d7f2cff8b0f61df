#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace vidseg {

constexpr int kDefaultBlockSize = 16;
constexpr int kFeatureStride = 16;

/// Label value reserved for "ignore" pixels in ground-truth maps.
constexpr std::uint8_t kIgnoreLabel = 255;

/// 2-D displacement. Units depend on context: pixels for motion fields,
/// feature cells for warp fields.
struct Vec2 {
    double dx = 0.0;
    double dy = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// An RGB raster, the unit of video input. Pixels are row-major H x W x 3,
/// 8 bits per channel. Immutable after construction.
class Frame {
public:
    Frame(int width, int height, std::vector<std::uint8_t> pixels, int index = 0);

    /// Solid-color frame, mostly for tests and synthetic scenes.
    static Frame filled(int width, int height, std::array<std::uint8_t, 3> rgb, int index = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    int index() const { return index_; }
    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

    std::uint8_t channel(int x, int y, int c) const {
        return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
    }

    /// Rec. 601 luma in [0, 255].
    double luma(int x, int y) const {
        const std::size_t base = (static_cast<std::size_t>(y) * width_ + x) * 3;
        return 0.299 * pixels_[base] + 0.587 * pixels_[base + 1] + 0.114 * pixels_[base + 2];
    }

private:
    int width_;
    int height_;
    int index_;
    std::vector<std::uint8_t> pixels_;
};

/// Grid of per-block displacements linking a frame to its predecessor.
///
/// Sign convention: vectors[b] points from block b's position in the current
/// frame to its best match in the previous frame, so gathering previous-frame
/// content at position + vector reconstructs the current frame. Forward
/// warping therefore uses the field as stored; backward warping negates it.
class MotionField {
public:
    MotionField(int grid_w, int grid_h, int block_size, std::vector<Vec2> vectors);

    static MotionField zero(int grid_w, int grid_h, int block_size = kDefaultBlockSize);

    /// Zero field sized for a frame of the given pixel dimensions.
    static MotionField zero_for_frame(int frame_w, int frame_h,
                                      int block_size = kDefaultBlockSize);

    int grid_w() const { return grid_w_; }
    int grid_h() const { return grid_h_; }
    int block_size() const { return block_size_; }
    const std::vector<Vec2>& vectors() const { return vectors_; }

    const Vec2& at(int bx, int by) const {
        return vectors_[static_cast<std::size_t>(by) * grid_w_ + bx];
    }

    friend bool operator==(const MotionField&, const MotionField&) = default;

private:
    int grid_w_;
    int grid_h_;
    int block_size_;
    std::vector<Vec2> vectors_;
};

/// Dense real-valued tensor produced by a feature network, at a fixed stride
/// relative to the source frame. Data is channel-major: data[c][y][x].
class FeatureMap {
public:
    FeatureMap(int channels, int fh, int fw, int stride, std::vector<double> data);

    static FeatureMap zeros(int channels, int fh, int fw, int stride = kFeatureStride);

    int channels() const { return channels_; }
    int fh() const { return fh_; }
    int fw() const { return fw_; }
    int stride() const { return stride_; }
    const std::vector<double>& data() const { return data_; }

    double at(int c, int y, int x) const {
        return data_[(static_cast<std::size_t>(c) * fh_ + y) * fw_ + x];
    }

    /// True when spatial dimensions, channel count and stride all agree.
    bool same_shape(const FeatureMap& other) const {
        return channels_ == other.channels_ && fh_ == other.fh_ && fw_ == other.fw_ &&
               stride_ == other.stride_;
    }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    int channels_;
    int fh_;
    int fw_;
    int stride_;
    std::vector<double> data_;
};

/// Motion resampled to feature-grid resolution, in cell units.
class WarpField {
public:
    WarpField(int fh, int fw, std::vector<Vec2> offsets);

    static WarpField zero(int fh, int fw);

    int fh() const { return fh_; }
    int fw() const { return fw_; }
    const std::vector<Vec2>& offsets() const { return offsets_; }

    const Vec2& at(int x, int y) const {
        return offsets_[static_cast<std::size_t>(y) * fw_ + x];
    }

    friend bool operator==(const WarpField&, const WarpField&) = default;

private:
    int fh_;
    int fw_;
    std::vector<Vec2> offsets_;
};

/// Per-pixel class labels. Labels are < num_classes, except kIgnoreLabel.
class SegMap {
public:
    SegMap(int width, int height, std::vector<std::uint8_t> labels, int num_classes);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<std::uint8_t>& labels() const { return labels_; }

    std::uint8_t at(int x, int y) const {
        return labels_[static_cast<std::size_t>(y) * width_ + x];
    }

    friend bool operator==(const SegMap&, const SegMap&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> labels_;
};

enum class FusionKind { max, average, conv };
enum class SchemeMode { baseline, prop, inter };

const char* to_string(FusionKind kind);
const char* to_string(SchemeMode mode);

struct PipelineConfig {
    int keyframe_interval = 1;
    FusionKind fusion = FusionKind::average;
    SchemeMode mode = SchemeMode::baseline;
    int num_classes = 0;
    int search_radius = 16;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

}  // namespace vidseg
