#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "io_detail.hpp"
#include "vidseg/io.hpp"

namespace vidseg {

namespace {

using detail::RawImage;

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

RawImage read_raw(const std::filesystem::path& path, int want_channels) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") return detail::read_png(path, want_channels);
    if (ext == ".ppm" || ext == ".pgm") return detail::read_pnm(path, want_channels);
    fail(path, "unsupported image extension '" + ext + "'");
}

void write_raw(const RawImage& image, const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        detail::write_png(image, path);
    } else if (ext == ".ppm" || ext == ".pgm") {
        if ((ext == ".ppm") != (image.channels == 3)) {
            fail(path, image.channels == 3 ? "RGB data needs .ppm or .png"
                                           : "grayscale data needs .pgm or .png");
        }
        detail::write_pnm(image, path);
    } else {
        fail(path, "unsupported image extension '" + ext + "'");
    }
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir,
                                               std::initializer_list<const char*> extensions) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error(dir.string() + ": not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = lower_extension(entry.path());
        if (std::any_of(extensions.begin(), extensions.end(),
                        [&](const char* e) { return ext == e; })) {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw std::runtime_error(dir.string() + ": no image files found");
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return files;
}

std::filesystem::path numbered_path(const std::filesystem::path& dir, const std::string& prefix,
                                    std::size_t index, const std::string& ext) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%06zu.%s", prefix.c_str(), index, ext.c_str());
    return dir / name;
}

}  // namespace

namespace detail {

RawImage read_pnm(const std::filesystem::path& path, int want_channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");

    std::string magic;
    in >> magic;
    const int channels = magic == "P6" ? 3 : magic == "P5" ? 1 : 0;
    if (channels == 0) fail(path, "not a binary PPM/PGM (magic '" + magic + "')");
    if (channels != want_channels) {
        fail(path, want_channels == 3 ? "expected an RGB image" : "expected a grayscale image");
    }

    // Header tokens may be separated by whitespace or '#' comments.
    const auto next_int = [&]() {
        for (;;) {
            const int c = in.peek();
            if (c == '#') {
                in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
            } else if (c != EOF && std::isspace(static_cast<unsigned char>(c))) {
                in.get();
            } else {
                break;
            }
        }
        long value = -1;
        in >> value;
        if (!in || value < 0) fail(path, "malformed header");
        return value;
    };

    const long width = next_int();
    const long height = next_int();
    const long maxval = next_int();
    if (width <= 0 || height <= 0 || width > 1 << 20 || height > 1 << 20) {
        fail(path, "implausible dimensions " + std::to_string(width) + "x" +
                       std::to_string(height));
    }
    if (maxval != 255) fail(path, "only maxval 255 is supported");
    in.get();  // single whitespace byte before the raster

    RawImage image;
    image.width = static_cast<int>(width);
    image.height = static_cast<int>(height);
    image.channels = channels;
    image.pixels.resize(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
        fail(path, "truncated raster");
    }
    return image;
}

void write_pnm(const RawImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out << (image.channels == 3 ? "P6\n" : "P5\n") << image.width << ' ' << image.height
        << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) fail(path, "write failed");
}

}  // namespace detail

Frame read_frame(const std::filesystem::path& path, int index) {
    RawImage image = read_raw(path, 3);
    return Frame(image.width, image.height, std::move(image.pixels), index);
}

void write_frame(const Frame& frame, const std::filesystem::path& path) {
    write_raw({frame.width(), frame.height(), 3, frame.pixels()}, path);
}

SegMap read_label_map(const std::filesystem::path& path, int num_classes) {
    RawImage image = read_raw(path, 1);
    try {
        return SegMap(image.width, image.height, std::move(image.pixels), num_classes);
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

void write_label_map(const SegMap& map, const std::filesystem::path& path) {
    write_raw({map.width(), map.height(), 1, map.labels()}, path);
}

std::vector<Frame> load_frames(const std::filesystem::path& dir) {
    std::vector<Frame> frames;
    for (const auto& path : list_images(dir, {".ppm", ".png"})) {
        Frame frame = read_frame(path, static_cast<int>(frames.size()));
        if (!frames.empty() && (frame.width() != frames[0].width() ||
                                frame.height() != frames[0].height())) {
            fail(path, "dimensions differ from the first frame");
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

std::vector<SegMap> load_labels(const std::filesystem::path& dir, int num_classes) {
    std::vector<SegMap> maps;
    for (const auto& path : list_images(dir, {".pgm", ".png"})) {
        SegMap map = read_label_map(path, num_classes);
        if (!maps.empty() &&
            (map.width() != maps[0].width() || map.height() != maps[0].height())) {
            fail(path, "dimensions differ from the first label map");
        }
        maps.push_back(std::move(map));
    }
    return maps;
}

void write_frames(std::span<const Frame> frames, const std::filesystem::path& dir,
                  const std::string& ext, const std::string& prefix) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        write_frame(frames[i], numbered_path(dir, prefix, i, ext));
    }
}

void write_label_maps(std::span<const SegMap> maps, const std::filesystem::path& dir,
                      const std::string& ext, const std::string& prefix) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        write_label_map(maps[i], numbered_path(dir, prefix, i, ext));
    }
}

}  // namespace vidseg
