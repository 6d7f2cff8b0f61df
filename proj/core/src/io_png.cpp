#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "io_detail.hpp"

namespace vidseg::detail {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp; the handlers below convert that into
// exceptions once the png structs are released.

}  // namespace

RawImage read_png(const std::filesystem::path& path, int want_channels) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) fail(path, "cannot open");

    png_byte header[8] = {};
    if (std::fread(header, 1, sizeof(header), file.get()) != sizeof(header) ||
        png_sig_cmp(header, 0, sizeof(header)) != 0) {
        fail(path, "not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng initialization failed");
    }

    RawImage image;
    std::vector<png_bytep> rows;  // declared outside the setjmp scope
    bool ok = false;
    if (setjmp(png_jmpbuf(png)) == 0) {
        png_init_io(png, file.get());
        png_set_sig_bytes(png, sizeof(header));
        png_read_info(png, info);

        const png_byte color_type = png_get_color_type(png, info);
        if (want_channels == 1) {
            if (color_type != PNG_COLOR_TYPE_GRAY) {
                longjmp(png_jmpbuf(png), 1);  // label maps must be grayscale
            }
            if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
        } else {
            // Normalize any color layout to 8-bit RGB.
            if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
            if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
                if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
                png_set_gray_to_rgb(png);
            }
            if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
            png_set_strip_alpha(png);
        }
        if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
        png_read_update_info(png, info);

        const png_uint_32 width = png_get_image_width(png, info);
        const png_uint_32 height = png_get_image_height(png, info);
        if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20) ||
            png_get_channels(png, info) != static_cast<png_uint_32>(want_channels)) {
            longjmp(png_jmpbuf(png), 1);
        }

        image.width = static_cast<int>(width);
        image.height = static_cast<int>(height);
        image.channels = want_channels;
        image.pixels.resize(static_cast<std::size_t>(width) * height * want_channels);

        rows.resize(height);
        const std::size_t row_bytes = static_cast<std::size_t>(width) * want_channels;
        for (png_uint_32 y = 0; y < height; ++y) {
            rows[y] = image.pixels.data() + y * row_bytes;
        }
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
        ok = true;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (!ok) {
        fail(path, want_channels == 1 ? "not a readable 8-bit grayscale PNG"
                                      : "not a readable 8-bit color PNG");
    }
    return image;
}

void write_png(const RawImage& image, const std::filesystem::path& path) {
    if (image.channels != 1 && image.channels != 3) {
        fail(path, "unsupported channel count " + std::to_string(image.channels));
    }
    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng initialization failed");
    }

    bool ok = false;
    if (setjmp(png_jmpbuf(png)) == 0) {
        png_init_io(png, file.get());
        png_set_IHDR(png, info, image.width, image.height, 8,
                     image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        const std::size_t row_bytes = static_cast<std::size_t>(image.width) * image.channels;
        for (int y = 0; y < image.height; ++y) {
            png_write_row(png, const_cast<png_bytep>(image.pixels.data() + y * row_bytes));
        }
        png_write_end(png, nullptr);
        ok = true;
    }
    png_destroy_write_struct(&png, &info);
    if (!ok) fail(path, "PNG write failed");
}

}  // namespace vidseg::detail
