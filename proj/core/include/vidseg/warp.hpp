#pragma once

#include <span>
#include <vector>

#include "vidseg/types.hpp"

namespace vidseg {

/// Warps a feature map by bilinear gathering: output[c, y, x] samples f at
/// (x + w.dx, y + w.dy), with sampling coordinates clamped to the map bounds.
/// All channels share the same field. Output values stay within
/// [min(f), max(f)] because bilinear weights form a convex combination.
FeatureMap bilinear_warp(const FeatureMap& f, const WarpField& w);

/// Chains single-step warps: returns O with O[0] = f and
/// O[i] = bilinear_warp(O[i-1], fields[i-1]) for i in 1..steps.
/// The result always has steps + 1 entries, so O[i] is f warped i steps.
std::vector<FeatureMap> propagate_chain(const FeatureMap& f, int steps,
                                        std::span<const WarpField> fields);

}  // namespace vidseg
