#include "vidseg/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace vidseg {

namespace {

std::vector<double> luma_plane(const Frame& frame) {
    std::vector<double> plane(static_cast<std::size_t>(frame.width()) * frame.height());
    std::size_t i = 0;
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            plane[i++] = frame.luma(x, y);
        }
    }
    return plane;
}

struct Candidate {
    double sse = 0.0;
    int l1 = 0;
    int dy = 0;
    int dx = 0;

    bool better_than(const Candidate& o) const {
        if (sse != o.sse) return sse < o.sse;
        if (l1 != o.l1) return l1 < o.l1;
        if (dy != o.dy) return dy < o.dy;
        return dx < o.dx;
    }
};

// Sum of squared luma differences between the curr block at (x0, y0) and the
// prev block at (x0 + dx, y0 + dy), both bw x bh and fully inside the frame.
double block_sse(const std::vector<double>& prev, const std::vector<double>& curr, int width,
                 int x0, int y0, int bw, int bh, int dx, int dy) {
    double sse = 0.0;
    for (int y = 0; y < bh; ++y) {
        const double* c = curr.data() + static_cast<std::size_t>(y0 + y) * width + x0;
        const double* p = prev.data() + static_cast<std::size_t>(y0 + dy + y) * width + x0 + dx;
        for (int x = 0; x < bw; ++x) {
            const double d = c[x] - p[x];
            sse += d * d;
        }
    }
    return sse;
}

void run_rows(int rows, int workers, const auto& fn) {
    if (workers <= 1 || rows <= 1) {
        for (int r = 0; r < rows; ++r) fn(r);
        return;
    }
    workers = std::min(workers, rows);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int r = w; r < rows; r += workers) fn(r);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

MotionField estimate_motion(const Frame& prev, const Frame& curr, const MatchParams& params,
                            int workers) {
    if (prev.width() != curr.width() || prev.height() != curr.height()) {
        throw std::invalid_argument("estimate_motion: frame dimensions differ (" +
                                    std::to_string(prev.width()) + "x" +
                                    std::to_string(prev.height()) + " vs " +
                                    std::to_string(curr.width()) + "x" +
                                    std::to_string(curr.height()) + ")");
    }
    if (params.block_size < 1 || params.search_radius < 0) {
        throw std::invalid_argument("estimate_motion: invalid match parameters");
    }

    const int width = curr.width();
    const int height = curr.height();
    const int bs = params.block_size;
    const int radius = params.search_radius;
    const int grid_w = (width + bs - 1) / bs;
    const int grid_h = (height + bs - 1) / bs;

    const std::vector<double> prev_luma = luma_plane(prev);
    const std::vector<double> curr_luma = luma_plane(curr);

    std::vector<Vec2> vectors(static_cast<std::size_t>(grid_w) * grid_h);

    run_rows(grid_h, workers, [&](int by) {
        const int y0 = by * bs;
        const int bh = std::min(bs, height - y0);
        const int dy_min = -std::min(radius, y0);
        const int dy_max = std::min(radius, height - bh - y0);
        for (int bx = 0; bx < grid_w; ++bx) {
            const int x0 = bx * bs;
            const int bw = std::min(bs, width - x0);
            const int dx_min = -std::min(radius, x0);
            const int dx_max = std::min(radius, width - bw - x0);

            Candidate best{block_sse(prev_luma, curr_luma, width, x0, y0, bw, bh, 0, 0), 0, 0, 0};
            for (int dy = dy_min; dy <= dy_max; ++dy) {
                for (int dx = dx_min; dx <= dx_max; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    Candidate c{block_sse(prev_luma, curr_luma, width, x0, y0, bw, bh, dx, dy),
                                std::abs(dx) + std::abs(dy), dy, dx};
                    if (c.better_than(best)) best = c;
                }
            }
            vectors[static_cast<std::size_t>(by) * grid_w + bx] = {
                static_cast<double>(best.dx), static_cast<double>(best.dy)};
        }
    });

    return MotionField(grid_w, grid_h, bs, std::move(vectors));
}

std::vector<MotionField> estimate_stream_motion(std::span<const Frame> frames,
                                                const MatchParams& params, int workers) {
    if (frames.empty()) {
        throw std::invalid_argument("estimate_stream_motion: empty frame list");
    }
    std::vector<MotionField> motion;
    motion.reserve(frames.size());
    motion.push_back(
        MotionField::zero_for_frame(frames[0].width(), frames[0].height(), params.block_size));
    for (std::size_t i = 1; i < frames.size(); ++i) {
        motion.push_back(estimate_motion(frames[i - 1], frames[i], params, workers));
    }
    return motion;
}

MotionField negate(const MotionField& mv) {
    std::vector<Vec2> vectors = mv.vectors();
    for (Vec2& v : vectors) {
        v.dx = -v.dx;
        v.dy = -v.dy;
    }
    return MotionField(mv.grid_w(), mv.grid_h(), mv.block_size(), std::move(vectors));
}

WarpField to_warp_field(const MotionField& mv, int stride) {
    if (stride <= 0) {
        throw std::invalid_argument("to_warp_field: stride must be positive");
    }
    const int bs = mv.block_size();
    const int extent_w = mv.grid_w() * bs;
    const int extent_h = mv.grid_h() * bs;
    const int fw = (extent_w + stride - 1) / stride;
    const int fh = (extent_h + stride - 1) / stride;

    std::vector<Vec2> offsets(static_cast<std::size_t>(fw) * fh);
    for (int cy = 0; cy < fh; ++cy) {
        const double center_y = (cy + 0.5) * stride;
        const int by = std::min(static_cast<int>(center_y / bs), mv.grid_h() - 1);
        for (int cx = 0; cx < fw; ++cx) {
            const double center_x = (cx + 0.5) * stride;
            const int bx = std::min(static_cast<int>(center_x / bs), mv.grid_w() - 1);
            const Vec2& v = mv.at(bx, by);
            offsets[static_cast<std::size_t>(cy) * fw + cx] = {v.dx / stride, v.dy / stride};
        }
    }
    return WarpField(fh, fw, std::move(offsets));
}

}  // namespace vidseg
