#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <vidseg/types.hpp>

// Deterministic builders for randomized tests. Every caller owns its RNG and
// seeds it explicitly, so a failing case reproduces from the test name alone.
namespace testsup {

inline vidseg::Frame random_frame(int width, int height, std::mt19937& rng, int index = 0) {
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 3);
    for (auto& p : pixels) p = static_cast<std::uint8_t>(byte(rng));
    return vidseg::Frame(width, height, std::move(pixels), index);
}

// Translates frame content by (dx, dy); uncovered pixels repeat the nearest
// source edge, matching what a camera pan leaves at the frame border.
inline vidseg::Frame shifted_frame(const vidseg::Frame& src, int dx, int dy, int index = 0) {
    const int w = src.width();
    const int h = src.height();
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        const int sy = std::clamp(y - dy, 0, h - 1);
        for (int x = 0; x < w; ++x) {
            const int sx = std::clamp(x - dx, 0, w - 1);
            for (int c = 0; c < 3; ++c) {
                pixels[(static_cast<std::size_t>(y) * w + x) * 3 + c] = src.channel(sx, sy, c);
            }
        }
    }
    return vidseg::Frame(w, h, std::move(pixels), index);
}

inline vidseg::FeatureMap random_map(int channels, int fh, int fw, std::mt19937& rng,
                                     double lo = 0.0, double hi = 1.0,
                                     int stride = vidseg::kFeatureStride) {
    std::uniform_real_distribution<double> value(lo, hi);
    std::vector<double> data(static_cast<std::size_t>(channels) * fh * fw);
    for (double& v : data) v = value(rng);
    return vidseg::FeatureMap(channels, fh, fw, stride, std::move(data));
}

// amplitude bounds |dx| and |dy|; integral fields exercise the pure-gather
// path, fractional ones the interpolating path.
inline vidseg::WarpField random_field(int fh, int fw, std::mt19937& rng, bool integral,
                                      double amplitude) {
    std::vector<vidseg::Vec2> offsets(static_cast<std::size_t>(fh) * fw);
    if (integral) {
        const int amp = static_cast<int>(amplitude);
        std::uniform_int_distribution<int> step(-amp, amp);
        for (auto& o : offsets) o = {static_cast<double>(step(rng)), static_cast<double>(step(rng))};
    } else {
        std::uniform_real_distribution<double> step(-amplitude, amplitude);
        for (auto& o : offsets) o = {step(rng), step(rng)};
    }
    return vidseg::WarpField(fh, fw, std::move(offsets));
}

inline vidseg::SegMap random_seg(int width, int height, int num_classes, std::mt19937& rng,
                                 double ignore_prob = 0.0) {
    std::uniform_int_distribution<int> label(0, num_classes - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(width) * height);
    for (auto& l : labels) {
        l = ignore_prob > 0.0 && unit(rng) < ignore_prob ? vidseg::kIgnoreLabel
                                                         : static_cast<std::uint8_t>(label(rng));
    }
    return vidseg::SegMap(width, height, std::move(labels), num_classes);
}

}  // namespace testsup
