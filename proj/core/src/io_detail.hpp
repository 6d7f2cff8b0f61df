#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

// Internal seams between the io translation units. Not installed.

namespace vidseg::detail {

struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    std::vector<std::uint8_t> pixels;
};

RawImage read_png(const std::filesystem::path& path, int want_channels);
void write_png(const RawImage& image, const std::filesystem::path& path);

RawImage read_pnm(const std::filesystem::path& path, int want_channels);
void write_pnm(const RawImage& image, const std::filesystem::path& path);

}  // namespace vidseg::detail
