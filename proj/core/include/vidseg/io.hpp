#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vidseg/eval.hpp"
#include "vidseg/fusion.hpp"
#include "vidseg/model.hpp"
#include "vidseg/scene.hpp"
#include "vidseg/types.hpp"

namespace vidseg {

/// Image formats are chosen by extension: frames are .ppm (binary P6) or
/// .png (8-bit RGB); label maps are .pgm (binary P5) or .png (8-bit gray),
/// one byte per pixel holding the class label, 255 reserved for ignore.
/// All reads and writes throw std::runtime_error naming the file on failure.

Frame read_frame(const std::filesystem::path& path, int index = 0);
void write_frame(const Frame& frame, const std::filesystem::path& path);

SegMap read_label_map(const std::filesystem::path& path, int num_classes);
void write_label_map(const SegMap& map, const std::filesystem::path& path);

/// Loads every .ppm/.png in the directory in lexicographic filename order,
/// assigning indices 0..N-1. Throws when the directory holds no image or
/// dimensions are inconsistent, naming the offending file.
std::vector<Frame> load_frames(const std::filesystem::path& dir);

/// Same traversal for .pgm/.png label maps.
std::vector<SegMap> load_labels(const std::filesystem::path& dir, int num_classes);

/// Writes one image per element into dir (created if needed), named
/// <prefix>_000000.<ext> onward. ext selects the format as above.
void write_frames(std::span<const Frame> frames, const std::filesystem::path& dir,
                  const std::string& ext = "png", const std::string& prefix = "frame");
void write_label_maps(std::span<const SegMap> maps, const std::filesystem::path& dir,
                      const std::string& ext = "png", const std::string& prefix = "label");

/// Motion sidecar: a compact binary carrier for a stream's motion fields.
///
/// Layout, all integers little-endian:
///   bytes 0..3    magic "BMVS"
///   bytes 4..7    u32 version (currently 1)
///   bytes 8..11   u32 grid_w
///   bytes 12..15  u32 grid_h
///   bytes 16..19  u32 block_size
///   bytes 20..23  u32 frame_count
///   bytes 24..    per frame, grid_h x grid_w (i16 dx, i16 dy) pairs in
///                 raster order
///
/// Frame 0 has no predecessor; its field is all-zero by convention, which
/// both directions enforce. Vectors must be integral and fit in i16.
/// Malformed input is rejected with the byte offset of the problem.
void write_motion_file(std::span<const MotionField> motion, const std::filesystem::path& path);
std::vector<MotionField> read_motion_file(const std::filesystem::path& path);

/// A centroid classifier plus the fusion operator it was paired with,
/// stored as one JSON document.
struct ModelBundle {
    ToyModel model;
    FusionWeights fusion;
};

void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

/// Scene specs serialize to JSON for reproducible synthetic streams.
void save_scene_spec(const SceneSpec& spec, const std::filesystem::path& path);
SceneSpec load_scene_spec(const std::filesystem::path& path);

/// Sweep results as CSV: header row, then one row per report with columns
/// scheme, interval, miou_avg, miou_min, fps, offset_0.., padded with empty
/// cells up to the widest interval.
void write_report_csv(std::span<const IntervalReport> reports, const std::filesystem::path& path);

/// Two-panel SVG line chart of the same reports: accuracy and throughput
/// against keyframe interval, one polyline per scheme.
void write_report_svg(std::span<const IntervalReport> reports, const std::filesystem::path& path);

}  // namespace vidseg
