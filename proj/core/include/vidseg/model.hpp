#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "vidseg/types.hpp"

namespace vidseg {

/// The expensive half of a segmentation model: frame in, feature map out at
/// a fixed stride. Implementations must be deterministic and safe for
/// concurrent read-only use.
class FeatureNetwork {
public:
    virtual ~FeatureNetwork() = default;
    virtual FeatureMap extract(const Frame& frame) const = 0;
    virtual int channels() const = 0;
    virtual int stride() const = 0;
};

/// The cheap half: feature map in, full-resolution label map out.
class TaskNetwork {
public:
    virtual ~TaskNetwork() = default;
    virtual SegMap segment(const FeatureMap& features, int out_width, int out_height) const = 0;
    virtual int num_classes() const = 0;
};

constexpr int kToyChannels = 12;

/// Hand-crafted per-cell descriptor standing in for a deep feature network.
///
/// Each 16x16 cell yields 12 values in [0, 1]: mean R, G, B; a 3-bin luma
/// histogram; mean |dI/dx| and |dI/dy|; and the mean luma of the four cell
/// quadrants. The descriptor is cell-local, so translating the scene content
/// translates the descriptors with it.
FeatureMap toy_features(const Frame& frame);

/// Nearest-centroid classifier head. Centroids are a num_classes x channels
/// row-major matrix; rows must be finite and pairwise distinct.
class ToyModel {
public:
    ToyModel(std::vector<double> centroids, int num_classes, int channels = kToyChannels);

    /// Random centroids in [0, 1], reproducible from the seed.
    static ToyModel random(int num_classes, unsigned seed, int channels = kToyChannels);

    /// Centroids matching the descriptors of flat-color regions, one class
    /// per palette entry. This is how a model is built for a synthetic scene
    /// whose classes are defined by color.
    static ToyModel from_colors(std::span<const std::array<std::uint8_t, 3>> colors);

    int num_classes() const { return num_classes_; }
    int channels() const { return channels_; }
    const std::vector<double>& centroids() const { return centroids_; }

    double centroid(int cls, int channel) const {
        return centroids_[static_cast<std::size_t>(cls) * channels_ + channel];
    }

private:
    std::vector<double> centroids_;
    int num_classes_;
    int channels_;
};

/// Classifies each cell by the nearest centroid (ties go to the lowest class
/// index) and upsamples the labels to pixel resolution by nearest neighbor.
SegMap toy_task(const FeatureMap& f, const ToyModel& model, int out_width, int out_height);

class ToyFeatureNetwork final : public FeatureNetwork {
public:
    FeatureMap extract(const Frame& frame) const override { return toy_features(frame); }
    int channels() const override { return kToyChannels; }
    int stride() const override { return kFeatureStride; }
};

class ToyTaskNetwork final : public TaskNetwork {
public:
    explicit ToyTaskNetwork(ToyModel model) : model_(std::move(model)) {}

    SegMap segment(const FeatureMap& features, int out_width, int out_height) const override {
        return toy_task(features, model_, out_width, out_height);
    }
    int num_classes() const override { return model_.num_classes(); }
    const ToyModel& model() const { return model_; }

private:
    ToyModel model_;
};

}  // namespace vidseg
