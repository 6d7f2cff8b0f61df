#include "vidseg/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace vidseg {

namespace {

struct Placement {
    double x0, y0, x1, y1;  // bounding box, pixel units
};

Placement bounds_at(const SceneObject& obj, int t) {
    const double steps = static_cast<double>(t - obj.enter_frame);
    const double px = obj.x + obj.vx * steps;
    const double py = obj.y + obj.vy * steps;
    if (obj.shape == SceneObject::Shape::rect) {
        return {px, py, px + obj.size_w, py + obj.size_h};
    }
    const double r = obj.size_w / 2.0;
    return {px - r, py - r, px + r, py + r};
}

bool covers(const SceneObject& obj, int t, int px, int py) {
    const double steps = static_cast<double>(t - obj.enter_frame);
    const double ox = obj.x + obj.vx * steps;
    const double oy = obj.y + obj.vy * steps;
    const double cx = px + 0.5;
    const double cy = py + 0.5;
    if (obj.shape == SceneObject::Shape::rect) {
        return cx >= ox && cx < ox + obj.size_w && cy >= oy && cy < oy + obj.size_h;
    }
    const double r = obj.size_w / 2.0;
    return (cx - ox) * (cx - ox) + (cy - oy) * (cy - oy) <= r * r;
}

}  // namespace

int SceneSpec::num_classes() const {
    int max_class = 0;
    for (const SceneObject& obj : objects) {
        max_class = std::max(max_class, obj.class_id);
    }
    return max_class + 1;
}

std::vector<std::array<std::uint8_t, 3>> SceneSpec::palette() const {
    std::vector<std::array<std::uint8_t, 3>> colors(num_classes(), background_color);
    for (const SceneObject& obj : objects) {
        colors[obj.class_id] = obj.color;
    }
    return colors;
}

void SceneSpec::validate() const {
    if (width <= 0 || height <= 0 || frame_count <= 0) {
        throw std::invalid_argument("SceneSpec: dimensions and frame count must be positive");
    }
    if (texture_amplitude < 0 || texture_amplitude > 127) {
        throw std::invalid_argument("SceneSpec: texture_amplitude must be in [0, 127]");
    }
    std::set<int> seen;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const SceneObject& obj = objects[i];
        if (obj.class_id < 1 || obj.class_id > 254) {
            throw std::invalid_argument("SceneSpec: object " + std::to_string(i) +
                                        " class_id must be in [1, 254]");
        }
        if (obj.size_w <= 0 || (obj.shape == SceneObject::Shape::rect && obj.size_h <= 0)) {
            throw std::invalid_argument("SceneSpec: object " + std::to_string(i) +
                                        " has non-positive size");
        }
        if (!seen.insert(obj.class_id).second) {
            throw std::invalid_argument("SceneSpec: duplicate class_id " +
                                        std::to_string(obj.class_id));
        }
        const int first = std::max(0, obj.enter_frame);
        const int last = std::min(frame_count, obj.exit_frame) - 1;
        if (last < first) continue;  // never visible
        for (int t : {first, last}) {
            const Placement b = bounds_at(obj, t);
            if (b.x0 < 0 || b.y0 < 0 || b.x1 > width || b.y1 > height) {
                throw std::invalid_argument("SceneSpec: object " + std::to_string(i) +
                                            " leaves the frame at t=" + std::to_string(t));
            }
        }
    }
    for (int cls = 1; cls < num_classes(); ++cls) {
        if (!seen.count(cls)) {
            throw std::invalid_argument("SceneSpec: class ids must be contiguous, missing " +
                                        std::to_string(cls));
        }
    }
}

SyntheticScene make_scene(const SceneSpec& spec, unsigned seed) {
    spec.validate();
    const int w = spec.width;
    const int h = spec.height;
    const int num_classes = spec.num_classes();

    // Static background texture, reproducible from the seed alone.
    std::mt19937 rng(seed);
    std::vector<std::uint8_t> background(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t p = 0; p < background.size(); p += 3) {
        const int amp = spec.texture_amplitude;
        const int noise = amp > 0 ? static_cast<int>(rng() % (2 * amp + 1)) - amp : 0;
        for (int c = 0; c < 3; ++c) {
            background[p + c] = static_cast<std::uint8_t>(
                std::clamp(spec.background_color[c] + noise, 0, 255));
        }
    }

    SyntheticScene scene;
    scene.spec = spec;
    scene.spec.seed = seed;
    scene.frames.reserve(spec.frame_count);
    scene.ground_truth.reserve(spec.frame_count);

    for (int t = 0; t < spec.frame_count; ++t) {
        std::vector<std::uint8_t> pixels = background;
        std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h, 0);
        for (const SceneObject& obj : spec.objects) {
            if (t < obj.enter_frame || t >= obj.exit_frame) continue;
            const Placement b = bounds_at(obj, t);
            const int px0 = std::max(0, static_cast<int>(std::floor(b.x0)));
            const int py0 = std::max(0, static_cast<int>(std::floor(b.y0)));
            const int px1 = std::min(w, static_cast<int>(std::ceil(b.x1)));
            const int py1 = std::min(h, static_cast<int>(std::ceil(b.y1)));
            for (int py = py0; py < py1; ++py) {
                for (int px = px0; px < px1; ++px) {
                    if (!covers(obj, t, px, py)) continue;
                    const std::size_t at = static_cast<std::size_t>(py) * w + px;
                    pixels[at * 3] = obj.color[0];
                    pixels[at * 3 + 1] = obj.color[1];
                    pixels[at * 3 + 2] = obj.color[2];
                    labels[at] = static_cast<std::uint8_t>(obj.class_id);
                }
            }
        }
        scene.frames.emplace_back(w, h, std::move(pixels), t);
        scene.ground_truth.emplace_back(w, h, std::move(labels), num_classes);
    }
    return scene;
}

SyntheticScene make_scene(const SceneSpec& spec) { return make_scene(spec, spec.seed); }

SceneSpec benchmark_scene_spec() {
    SceneSpec spec;
    spec.width = 160;
    spec.height = 128;
    spec.frame_count = 60;
    spec.background_color = {90, 90, 90};
    spec.texture_amplitude = 8;
    spec.seed = 7;

    SceneObject car;
    car.shape = SceneObject::Shape::rect;
    car.class_id = 1;
    car.color = {200, 40, 40};
    car.size_w = 40;
    car.size_h = 26;
    car.x = 0;
    car.y = 16;
    car.vx = 2.0;
    car.vy = 0.0;
    spec.objects.push_back(car);

    SceneObject ball;
    ball.shape = SceneObject::Shape::disk;
    ball.class_id = 2;
    ball.color = {40, 180, 60};
    ball.size_w = 32;  // diameter
    ball.x = 140;
    ball.y = 40;
    ball.vx = -2.0;
    ball.vy = 1.0;
    spec.objects.push_back(ball);

    SceneObject sign;
    sign.shape = SceneObject::Shape::rect;
    sign.class_id = 3;
    sign.color = {230, 200, 40};
    sign.size_w = 24;
    sign.size_h = 24;
    sign.x = 28;
    sign.y = 96;
    sign.vx = 1.0;
    sign.vy = 0.0;
    spec.objects.push_back(sign);

    // Enters mid-stream to exercise content that forward propagation cannot
    // see; the entry phase is chosen so no sweep interval gets a keyframe
    // aligned fortuitously enough to mask the propagation decay.
    SceneObject walker;
    walker.shape = SceneObject::Shape::rect;
    walker.class_id = 4;
    walker.color = {60, 80, 220};
    walker.size_w = 34;
    walker.size_h = 34;
    walker.x = 96;
    walker.y = 24;
    walker.vx = 1.0;
    walker.vy = 1.0;
    walker.enter_frame = 35;
    spec.objects.push_back(walker);

    return spec;
}

}  // namespace vidseg
