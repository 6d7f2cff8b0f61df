#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "vidseg/types.hpp"

namespace vidseg {

/// One moving object in a synthetic scene. Position is the top-left corner
/// for rectangles and the center for disks, in pixels at frame 0 of the
/// object's life; it advances by (vx, vy) per frame.
struct SceneObject {
    enum class Shape { rect, disk };

    Shape shape = Shape::rect;
    int class_id = 1;
    std::array<std::uint8_t, 3> color{255, 255, 255};
    double size_w = 16.0;  // rect width, or disk diameter
    double size_h = 16.0;  // rect height (ignored for disks)
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    int enter_frame = 0;
    int exit_frame = std::numeric_limits<int>::max();
};

struct SceneSpec {
    int width = 160;
    int height = 128;
    int frame_count = 60;
    std::array<std::uint8_t, 3> background_color{96, 96, 96};
    /// Static per-pixel noise added to the background, +/- this amplitude.
    int texture_amplitude = 8;
    std::vector<SceneObject> objects;
    unsigned seed = 1;

    /// Background is class 0; object classes follow.
    int num_classes() const;

    /// One representative color per class, background first. Used to build
    /// a matching nearest-centroid model.
    std::vector<std::array<std::uint8_t, 3>> palette() const;

    /// Throws std::invalid_argument when an object leaves the frame during
    /// its lifetime or class ids are inconsistent.
    void validate() const;
};

struct SyntheticScene {
    std::vector<Frame> frames;
    std::vector<SegMap> ground_truth;
    SceneSpec spec;
};

/// Renders the scene with exact per-pixel ground truth. Objects are drawn in
/// list order over a statically textured background; a pixel belongs to an
/// object when its center falls inside the shape. The seed parameter
/// overrides spec.seed.
SyntheticScene make_scene(const SceneSpec& spec, unsigned seed);
SyntheticScene make_scene(const SceneSpec& spec);

/// The bundled benchmark: a 60-frame 160x128 scene with three translating
/// objects and a fourth that enters mid-stream, over a textured background.
SceneSpec benchmark_scene_spec();

}  // namespace vidseg
