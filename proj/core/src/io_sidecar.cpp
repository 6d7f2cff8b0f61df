#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidseg/io.hpp"

namespace vidseg {

namespace {

constexpr char kMagic[4] = {'B', 'M', 'V', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 24;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what,
                       std::size_t byte_offset) {
    throw std::runtime_error(path.string() + ": " + what + " at byte " +
                             std::to_string(byte_offset));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_i16(std::vector<std::uint8_t>& out, std::int16_t v) {
    const auto u = static_cast<std::uint16_t>(v);
    out.push_back(static_cast<std::uint8_t>(u));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::int16_t get_i16(const std::uint8_t* p) {
    return static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0]) |
                                     static_cast<std::uint16_t>(p[1]) << 8);
}

// Vectors travel as i16; anything fractional or out of range has no exact
// representation and is refused rather than rounded.
std::int16_t to_i16_component(double v, std::size_t frame, const std::filesystem::path& path) {
    if (std::rint(v) != v || v < -32768.0 || v > 32767.0) {
        throw std::runtime_error(path.string() + ": frame " + std::to_string(frame) +
                                 " has a motion component " + std::to_string(v) +
                                 " not representable as i16");
    }
    return static_cast<std::int16_t>(v);
}

}  // namespace

void write_motion_file(std::span<const MotionField> motion, const std::filesystem::path& path) {
    std::uint32_t grid_w = 0;
    std::uint32_t grid_h = 0;
    std::uint32_t block_size = kDefaultBlockSize;
    if (!motion.empty()) {
        grid_w = static_cast<std::uint32_t>(motion[0].grid_w());
        grid_h = static_cast<std::uint32_t>(motion[0].grid_h());
        block_size = static_cast<std::uint32_t>(motion[0].block_size());
        for (std::size_t i = 0; i < motion.size(); ++i) {
            if (motion[i].grid_w() != motion[0].grid_w() ||
                motion[i].grid_h() != motion[0].grid_h() ||
                motion[i].block_size() != motion[0].block_size()) {
                throw std::runtime_error(path.string() + ": frame " + std::to_string(i) +
                                         " grid differs from frame 0");
            }
        }
        for (const Vec2& v : motion[0].vectors()) {
            if (v.dx != 0.0 || v.dy != 0.0) {
                throw std::runtime_error(path.string() +
                                         ": frame 0 must carry an all-zero field");
            }
        }
    }

    std::vector<std::uint8_t> bytes;
    bytes.reserve(kHeaderBytes + motion.size() * static_cast<std::size_t>(grid_w) * grid_h * 4);
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    put_u32(bytes, kVersion);
    put_u32(bytes, grid_w);
    put_u32(bytes, grid_h);
    put_u32(bytes, block_size);
    put_u32(bytes, static_cast<std::uint32_t>(motion.size()));
    for (std::size_t i = 0; i < motion.size(); ++i) {
        for (const Vec2& v : motion[i].vectors()) {
            put_i16(bytes, to_i16_component(v.dx, i, path));
            put_i16(bytes, to_i16_component(v.dy, i, path));
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<MotionField> read_motion_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error(path.string() + ": read failed");

    if (bytes.size() < kHeaderBytes) {
        fail(path, "truncated header", bytes.size());
    }
    if (!std::equal(kMagic, kMagic + 4, bytes.begin())) {
        fail(path, "bad magic", 0);
    }
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kVersion) {
        fail(path, "unsupported version " + std::to_string(version), 4);
    }
    const std::uint32_t grid_w = get_u32(bytes.data() + 8);
    const std::uint32_t grid_h = get_u32(bytes.data() + 12);
    const std::uint32_t block_size = get_u32(bytes.data() + 16);
    const std::uint32_t frame_count = get_u32(bytes.data() + 20);

    if (frame_count == 0) {
        if (bytes.size() != kHeaderBytes) fail(path, "trailing data", kHeaderBytes);
        return {};
    }
    if (grid_w == 0 || grid_h == 0 || grid_w > (1u << 20) || grid_h > (1u << 20)) {
        fail(path, "implausible grid " + std::to_string(grid_w) + "x" + std::to_string(grid_h),
             8);
    }
    if (block_size == 0 || block_size > (1u << 20)) {
        fail(path, "implausible block size " + std::to_string(block_size), 16);
    }

    const std::size_t per_frame = static_cast<std::size_t>(grid_w) * grid_h * 4;
    const std::size_t expected = kHeaderBytes + per_frame * frame_count;
    if (bytes.size() < expected) {
        fail(path, "truncated payload (" + std::to_string(expected) + " bytes expected)",
             bytes.size());
    }
    if (bytes.size() > expected) {
        fail(path, "trailing data", expected);
    }

    std::vector<MotionField> motion;
    motion.reserve(frame_count);
    for (std::uint32_t f = 0; f < frame_count; ++f) {
        const std::uint8_t* p = bytes.data() + kHeaderBytes + per_frame * f;
        std::vector<Vec2> vectors(static_cast<std::size_t>(grid_w) * grid_h);
        for (Vec2& v : vectors) {
            v.dx = get_i16(p);
            v.dy = get_i16(p + 2);
            p += 4;
        }
        if (f == 0) {
            for (std::size_t i = 0; i < vectors.size(); ++i) {
                if (vectors[i].dx != 0.0 || vectors[i].dy != 0.0) {
                    fail(path, "frame 0 field must be all-zero",
                         kHeaderBytes + i * 4);
                }
            }
        }
        motion.emplace_back(static_cast<int>(grid_w), static_cast<int>(grid_h),
                            static_cast<int>(block_size), std::move(vectors));
    }
    return motion;
}

}  // namespace vidseg
