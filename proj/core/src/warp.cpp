#include "vidseg/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vidseg {

namespace {

struct Tap {
    int x0, x1, y0, y1;
    double w00, w01, w10, w11;
};

}  // namespace

FeatureMap bilinear_warp(const FeatureMap& f, const WarpField& w) {
    if (f.fh() != w.fh() || f.fw() != w.fw()) {
        throw std::invalid_argument("bilinear_warp: map is " + std::to_string(f.fw()) + "x" +
                                    std::to_string(f.fh()) + " but field is " +
                                    std::to_string(w.fw()) + "x" + std::to_string(w.fh()));
    }

    const int fh = f.fh();
    const int fw = f.fw();
    const int channels = f.channels();

    // Sampling geometry is channel-independent, so resolve it once.
    std::vector<Tap> taps(static_cast<std::size_t>(fh) * fw);
    for (int y = 0; y < fh; ++y) {
        for (int x = 0; x < fw; ++x) {
            const Vec2& off = w.at(x, y);
            const double sx = std::clamp(x + off.dx, 0.0, static_cast<double>(fw - 1));
            const double sy = std::clamp(y + off.dy, 0.0, static_cast<double>(fh - 1));
            Tap& t = taps[static_cast<std::size_t>(y) * fw + x];
            t.x0 = static_cast<int>(std::floor(sx));
            t.y0 = static_cast<int>(std::floor(sy));
            t.x1 = std::min(t.x0 + 1, fw - 1);
            t.y1 = std::min(t.y0 + 1, fh - 1);
            const double ax = sx - t.x0;
            const double ay = sy - t.y0;
            t.w00 = (1.0 - ax) * (1.0 - ay);
            t.w01 = ax * (1.0 - ay);
            t.w10 = (1.0 - ax) * ay;
            t.w11 = ax * ay;
        }
    }

    std::vector<double> out(static_cast<std::size_t>(channels) * fh * fw);
    const std::size_t plane = static_cast<std::size_t>(fh) * fw;
    for (int c = 0; c < channels; ++c) {
        const double* src = f.data().data() + c * plane;
        double* dst = out.data() + c * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            const Tap& t = taps[i];
            dst[i] = t.w00 * src[static_cast<std::size_t>(t.y0) * fw + t.x0] +
                     t.w01 * src[static_cast<std::size_t>(t.y0) * fw + t.x1] +
                     t.w10 * src[static_cast<std::size_t>(t.y1) * fw + t.x0] +
                     t.w11 * src[static_cast<std::size_t>(t.y1) * fw + t.x1];
        }
    }
    return FeatureMap(channels, fh, fw, f.stride(), std::move(out));
}

std::vector<FeatureMap> propagate_chain(const FeatureMap& f, int steps,
                                        std::span<const WarpField> fields) {
    if (steps < 0) {
        throw std::invalid_argument("propagate_chain: steps must be non-negative");
    }
    if (std::cmp_less(fields.size(), steps)) {
        throw std::invalid_argument("propagate_chain: " + std::to_string(fields.size()) +
                                    " fields for " + std::to_string(steps) + " steps");
    }
    std::vector<FeatureMap> chain;
    chain.reserve(static_cast<std::size_t>(steps) + 1);
    chain.push_back(f);
    for (int i = 1; i <= steps; ++i) {
        chain.push_back(bilinear_warp(chain.back(), fields[i - 1]));
    }
    return chain;
}

}  // namespace vidseg
