#pragma once

#include <span>
#include <vector>

#include "vidseg/types.hpp"

namespace vidseg {

/// Block matching parameters. Matching minimizes mean squared error over
/// the luma plane, exhaustively within +/- search_radius pixels.
struct MatchParams {
    int block_size = kDefaultBlockSize;
    int search_radius = 16;
};

/// Computes the block motion field linking curr to prev.
///
/// For each block of curr, the result holds the integer (dx, dy) within
/// +/- search_radius that minimizes MSE against prev. Partial blocks at the
/// right/bottom edges are matched over their actual extent, and candidate
/// windows are clamped so the reference block stays inside the frame.
///
/// Ties are broken toward the smaller L1 displacement, then the smaller dy,
/// then the smaller dx, so the result is deterministic for any worker count.
MotionField estimate_motion(const Frame& prev, const Frame& curr,
                            const MatchParams& params = {}, int workers = 1);

/// Motion for a whole stream: entry i links frame i-1 to frame i. Entry 0
/// has no predecessor and is all-zero by convention.
std::vector<MotionField> estimate_stream_motion(std::span<const Frame> frames,
                                                const MatchParams& params = {}, int workers = 1);

/// Multiplies every vector by -1.
MotionField negate(const MotionField& mv);

/// Resamples a motion field to feature-grid resolution: each cell takes the
/// vector of the block covering its center, divided by stride to convert
/// pixel offsets into cell offsets. With stride == block_size the mapping is
/// one-to-one; the pipeline only ever runs that configuration.
WarpField to_warp_field(const MotionField& mv, int stride);

}  // namespace vidseg
