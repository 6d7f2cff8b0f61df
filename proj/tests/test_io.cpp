#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>
#include <vidseg/io.hpp>

#include "test_support.hpp"

using namespace vidseg;
namespace fs = std::filesystem;

namespace {

// Unique scratch directory, removed when the test block ends.
struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("vidseg_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path file(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

MotionField integral_field(int grid_w, int grid_h, std::mt19937& rng, int amplitude = 12) {
    std::uniform_int_distribution<int> d(-amplitude, amplitude);
    std::vector<Vec2> vectors(static_cast<std::size_t>(grid_w) * grid_h);
    for (Vec2& v : vectors) {
        v.dx = d(rng);
        v.dy = d(rng);
    }
    return MotionField(grid_w, grid_h, 16, std::move(vectors));
}

bool same_field(const MotionField& a, const MotionField& b) {
    return a.grid_w() == b.grid_w() && a.grid_h() == b.grid_h() &&
           a.block_size() == b.block_size() && a.vectors() == b.vectors();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("frames round-trip through PPM and PNG") {
    TempDir dir;
    std::mt19937 rng(601);
    Frame frame = testsup::random_frame(37, 23, rng);

    for (const char* name : {"frame.ppm", "frame.png"}) {
        CAPTURE(name);
        write_frame(frame, dir.file(name));
        Frame loaded = read_frame(dir.file(name), 42);
        CHECK(loaded.width() == 37);
        CHECK(loaded.height() == 23);
        CHECK(loaded.index() == 42);
        CHECK(loaded.pixels() == frame.pixels());
    }

    CHECK_THROWS_WITH_AS(write_frame(frame, dir.file("frame.pgm")),
                         doctest::Contains("RGB data needs"), std::runtime_error);
    CHECK_THROWS_WITH_AS(write_frame(frame, dir.file("frame.bmp")),
                         doctest::Contains("unsupported image extension"), std::runtime_error);
    CHECK_THROWS_AS(read_frame(dir.file("absent.ppm")), std::runtime_error);
}

TEST_CASE("label maps round-trip through PGM and PNG") {
    TempDir dir;
    std::mt19937 rng(602);
    SegMap map = testsup::random_seg(19, 11, 5, rng, 0.15);

    for (const char* name : {"labels.pgm", "labels.png"}) {
        CAPTURE(name);
        write_label_map(map, dir.file(name));
        SegMap loaded = read_label_map(dir.file(name), 5);
        CHECK(loaded == map);
    }

    // Stored labels must fit the declared class count on the way back in.
    SegMap high(2, 1, {0, 4}, 5);
    write_label_map(high, dir.file("high.pgm"));
    CHECK_THROWS_AS(read_label_map(dir.file("high.pgm"), 3), std::runtime_error);
    CHECK_THROWS_WITH_AS(write_label_map(map, dir.file("labels.ppm")),
                         doctest::Contains("grayscale data needs"), std::runtime_error);
}

TEST_CASE("PNM headers are parsed strictly") {
    TempDir dir;

    spit(dir.file("bad_magic.ppm"), "P7\n2 2\n255\n" + std::string(12, '\0'));
    CHECK_THROWS_WITH_AS(read_frame(dir.file("bad_magic.ppm")),
                         doctest::Contains("not a binary PPM/PGM"), std::runtime_error);

    spit(dir.file("gray.pgm"), "P5\n2 2\n255\n" + std::string(4, '\7'));
    CHECK_THROWS_WITH_AS(read_frame(dir.file("gray.pgm")),
                         doctest::Contains("expected an RGB image"), std::runtime_error);

    spit(dir.file("short.ppm"), "P6\n4 4\n255\n" + std::string(10, '\0'));
    CHECK_THROWS_WITH_AS(read_frame(dir.file("short.ppm")),
                         doctest::Contains("truncated raster"), std::runtime_error);

    spit(dir.file("deep.ppm"), "P6\n2 2\n65535\n" + std::string(24, '\0'));
    CHECK_THROWS_WITH_AS(read_frame(dir.file("deep.ppm")),
                         doctest::Contains("only maxval 255"), std::runtime_error);

    spit(dir.file("negative.ppm"), "P6\n-2 2\n255\n");
    CHECK_THROWS_AS(read_frame(dir.file("negative.ppm")), std::runtime_error);

    // Comments between header tokens are part of the format.
    spit(dir.file("commented.ppm"),
         "P6\n# width and height\n2 # inline\n1\n# maxval next\n255\n" + std::string(6, '\5'));
    Frame commented = read_frame(dir.file("commented.ppm"));
    CHECK(commented.width() == 2);
    CHECK(commented.height() == 1);
    CHECK(commented.channel(0, 0, 0) == 5);
}

TEST_CASE("frame directories load in filename order") {
    TempDir dir;
    std::mt19937 rng(603);
    Frame first = testsup::random_frame(20, 14, rng);
    Frame second = testsup::random_frame(20, 14, rng);
    Frame third = testsup::random_frame(20, 14, rng);

    // Written out of order, and in mixed formats; the loader sorts by name.
    write_frame(third, dir.file("c_frame.ppm"));
    write_frame(first, dir.file("a_frame.png"));
    write_frame(second, dir.file("b_frame.ppm"));
    spit(dir.file("notes.txt"), "ignored");

    std::vector<Frame> frames = load_frames(dir.path);
    REQUIRE(frames.size() == 3);
    CHECK(frames[0].pixels() == first.pixels());
    CHECK(frames[1].pixels() == second.pixels());
    CHECK(frames[2].pixels() == third.pixels());
    CHECK(frames[0].index() == 0);
    CHECK(frames[2].index() == 2);

    write_frame(testsup::random_frame(10, 14, rng), dir.file("d_frame.ppm"));
    CHECK_THROWS_WITH_AS(load_frames(dir.path), doctest::Contains("dimensions differ"),
                         std::runtime_error);
}

TEST_CASE("write_frames numbers its outputs") {
    TempDir dir;
    std::mt19937 rng(604);
    std::vector<Frame> frames{testsup::random_frame(18, 12, rng),
                              testsup::random_frame(18, 12, rng)};
    write_frames(frames, dir.file("stream"), "ppm");
    CHECK(fs::exists(dir.file("stream") / "frame_000000.ppm"));
    CHECK(fs::exists(dir.file("stream") / "frame_000001.ppm"));
    std::vector<Frame> loaded = load_frames(dir.file("stream"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].pixels() == frames[0].pixels());
    CHECK(loaded[1].pixels() == frames[1].pixels());

    std::vector<SegMap> maps{testsup::random_seg(18, 12, 4, rng, 0.0),
                             testsup::random_seg(18, 12, 4, rng, 0.0)};
    write_label_maps(maps, dir.file("labels"), "pgm", "gt");
    CHECK(fs::exists(dir.file("labels") / "gt_000000.pgm"));
    std::vector<SegMap> maps_back = load_labels(dir.file("labels"), 4);
    REQUIRE(maps_back.size() == 2);
    CHECK(maps_back[0] == maps[0]);
    CHECK(maps_back[1] == maps[1]);
}

TEST_CASE("empty or missing directories are rejected") {
    TempDir dir;
    CHECK_THROWS_WITH_AS(load_frames(dir.path), doctest::Contains("no image files"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(load_frames(dir.file("nowhere")), doctest::Contains("not a directory"),
                         std::runtime_error);
    CHECK_THROWS_AS(load_labels(dir.path, 4), std::runtime_error);
}

TEST_CASE("motion files round-trip") {
    TempDir dir;
    std::mt19937 rng(605);

    std::vector<MotionField> motion;
    motion.push_back(MotionField::zero(5, 3, 16));
    motion.push_back(integral_field(5, 3, rng));
    motion.push_back(integral_field(5, 3, rng));

    const fs::path path = dir.file("stream.bmvs");
    write_motion_file(motion, path);
    std::vector<MotionField> loaded = read_motion_file(path);
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < motion.size(); ++i) {
        CAPTURE(i);
        CHECK(same_field(loaded[i], motion[i]));
    }

    // Extreme but representable components survive.
    std::vector<Vec2> extremes(4);
    extremes[1] = {-32768.0, 32767.0};
    extremes[2] = {32767.0, -32768.0};
    std::vector<MotionField> wide{MotionField::zero(2, 2, 8),
                                  MotionField(2, 2, 8, std::move(extremes))};
    write_motion_file(wide, path);
    std::vector<MotionField> wide_back = read_motion_file(path);
    CHECK(same_field(wide_back[1], wide[1]));

    write_motion_file({}, path);
    CHECK(read_motion_file(path).empty());
}

TEST_CASE("motion file writing rejects unrepresentable fields") {
    TempDir dir;
    const fs::path path = dir.file("bad.bmvs");

    std::vector<MotionField> fractional{MotionField::zero(2, 2, 16),
                                        MotionField(2, 2, 16, std::vector<Vec2>{{0.5, 0.0},
                                                                                {0, 0},
                                                                                {0, 0},
                                                                                {0, 0}})};
    CHECK_THROWS_WITH_AS(write_motion_file(fractional, path),
                         doctest::Contains("not representable as i16"), std::runtime_error);

    std::vector<MotionField> ragged{MotionField::zero(2, 2, 16), MotionField::zero(3, 2, 16)};
    CHECK_THROWS_WITH_AS(write_motion_file(ragged, path),
                         doctest::Contains("grid differs from frame 0"), std::runtime_error);

    std::vector<MotionField> moving_head{
        MotionField(2, 2, 16, std::vector<Vec2>{{1, 0}, {0, 0}, {0, 0}, {0, 0}})};
    CHECK_THROWS_WITH_AS(write_motion_file(moving_head, path),
                         doctest::Contains("frame 0 must carry an all-zero field"),
                         std::runtime_error);
}

TEST_CASE("motion file corruption is reported with a byte offset") {
    TempDir dir;
    std::mt19937 rng(606);
    const fs::path path = dir.file("stream.bmvs");
    const std::vector<MotionField> stream{MotionField::zero(3, 2, 16),
                                          integral_field(3, 2, rng)};
    write_motion_file(stream, path);
    const std::string good = slurp(path);

    std::string bad = good;
    bad[0] = 'X';
    spit(path, bad);
    CHECK_THROWS_WITH_AS(read_motion_file(path), doctest::Contains("bad magic at byte 0"),
                         std::runtime_error);

    spit(path, good.substr(0, 10));
    CHECK_THROWS_WITH_AS(read_motion_file(path), doctest::Contains("truncated header at byte 10"),
                         std::runtime_error);

    bad = good;
    bad[4] = 2;
    spit(path, bad);
    CHECK_THROWS_WITH_AS(read_motion_file(path),
                         doctest::Contains("unsupported version 2 at byte 4"), std::runtime_error);

    spit(path, good.substr(0, good.size() - 2));
    CHECK_THROWS_WITH_AS(read_motion_file(path), doctest::Contains("truncated payload"),
                         std::runtime_error);

    spit(path, good + "x");
    CHECK_THROWS_WITH_AS(read_motion_file(path),
                         doctest::Contains(("trailing data at byte " +
                                            std::to_string(good.size())).c_str()),
                         std::runtime_error);

    bad = good;
    bad[24] = 3;  // first dx of the conventional all-zero frame 0
    spit(path, bad);
    CHECK_THROWS_WITH_AS(read_motion_file(path),
                         doctest::Contains("frame 0 field must be all-zero at byte 24"),
                         std::runtime_error);

    bad = good;
    bad[8] = 0;  // grid_w low byte
    spit(path, bad);
    CHECK_THROWS_WITH_AS(read_motion_file(path), doctest::Contains("implausible grid"),
                         std::runtime_error);
}

TEST_CASE("model bundles round-trip through JSON") {
    TempDir dir;
    const fs::path path = dir.file("model.json");

    ModelBundle bundle{ToyModel::random(4, 9), FusionWeights::averaging()};
    save_model(bundle, path);
    ModelBundle loaded = load_model(path);
    CHECK(loaded.model.num_classes() == 4);
    CHECK(loaded.model.channels() == kToyChannels);
    CHECK(loaded.model.centroids() == bundle.model.centroids());
    CHECK(loaded.fusion.kind == FusionKind::average);
    CHECK_FALSE(loaded.fusion.conv.has_value());

    std::mt19937 rng(607);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ConvKernel kernel;
    kernel.channels = kToyChannels;
    kernel.weights.resize(static_cast<std::size_t>(kToyChannels) * 2 * kToyChannels);
    kernel.bias.resize(kToyChannels);
    for (double& v : kernel.weights) v = unit(rng);
    for (double& v : kernel.bias) v = unit(rng);

    ModelBundle conv_bundle{ToyModel::random(3, 11), FusionWeights::with_kernel(kernel)};
    save_model(conv_bundle, path);
    ModelBundle conv_loaded = load_model(path);
    CHECK(conv_loaded.fusion.kind == FusionKind::conv);
    REQUIRE(conv_loaded.fusion.conv.has_value());
    CHECK(conv_loaded.fusion.conv->weights == kernel.weights);
    CHECK(conv_loaded.fusion.conv->bias == kernel.bias);
}

TEST_CASE("model documents are validated on load") {
    TempDir dir;
    const fs::path path = dir.file("model.json");

    spit(path, "{not json");
    CHECK_THROWS_AS(load_model(path), std::runtime_error);

    spit(path, R"({"format": "something-else", "version": 1})");
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("not a vidseg-model document"),
                         std::runtime_error);

    spit(path, R"({"format": "vidseg-model", "version": 3})");
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("unsupported version"),
                         std::runtime_error);

    // Structurally valid JSON whose centroid matrix is inconsistent.
    spit(path, R"({"format": "vidseg-model", "version": 1,
                   "toy": {"channels": 12, "num_classes": 2, "centroids": [1.0, 2.0]},
                   "fusion": {"kind": "average"}})");
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("centroid"), std::runtime_error);

    spit(path, R"({"format": "vidseg-model", "version": 1,
                   "toy": {"channels": 1, "num_classes": 2, "centroids": [0.0, 1.0]},
                   "fusion": {"kind": "median"}})");
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("unknown fusion kind"),
                         std::runtime_error);

    CHECK_THROWS_AS(load_model(dir.file("absent.json")), std::runtime_error);
}

TEST_CASE("scene specs round-trip through JSON") {
    TempDir dir;
    const fs::path path = dir.file("scene.json");

    SceneSpec spec = benchmark_scene_spec();
    save_scene_spec(spec, path);
    SceneSpec loaded = load_scene_spec(path);

    CHECK(loaded.width == spec.width);
    CHECK(loaded.height == spec.height);
    CHECK(loaded.frame_count == spec.frame_count);
    CHECK(loaded.background_color == spec.background_color);
    CHECK(loaded.texture_amplitude == spec.texture_amplitude);
    CHECK(loaded.seed == spec.seed);
    REQUIRE(loaded.objects.size() == spec.objects.size());
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        CAPTURE(i);
        const SceneObject& a = spec.objects[i];
        const SceneObject& b = loaded.objects[i];
        CHECK(a.shape == b.shape);
        CHECK(a.class_id == b.class_id);
        CHECK(a.color == b.color);
        CHECK(a.size_w == b.size_w);
        CHECK(a.size_h == b.size_h);
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
        CHECK(a.vx == b.vx);
        CHECK(a.vy == b.vy);
        CHECK(a.enter_frame == b.enter_frame);
        CHECK(a.exit_frame == b.exit_frame);
    }

    // The rendered scenes agree frame for frame.
    SyntheticScene original = make_scene(spec);
    SyntheticScene reloaded = make_scene(loaded);
    CHECK(original.frames[59].pixels() == reloaded.frames[59].pixels());
    CHECK(original.ground_truth[59] == reloaded.ground_truth[59]);
}

TEST_CASE("scene documents are validated on load") {
    TempDir dir;
    const fs::path path = dir.file("scene.json");

    spit(path, R"({"format": "vidseg-scene", "version": 1, "width": 64, "height": 48,
                   "frame_count": 4, "background_color": [9, 9, 9],
                   "objects": [{"shape": "blob", "class_id": 1, "color": [1, 2, 3],
                                "size_w": 8, "x": 4, "y": 4}]})");
    CHECK_THROWS_WITH_AS(load_scene_spec(path), doctest::Contains("unknown shape 'blob'"),
                         std::runtime_error);

    // Loading runs the same consistency checks as direct construction.
    spit(path, R"({"format": "vidseg-scene", "version": 1, "width": 64, "height": 48,
                   "frame_count": 4, "background_color": [9, 9, 9],
                   "objects": [{"shape": "rect", "class_id": 1, "color": [1, 2, 3],
                                "size_w": 8, "size_h": 8, "x": 4, "y": 4},
                               {"shape": "rect", "class_id": 1, "color": [4, 5, 6],
                                "size_w": 8, "size_h": 8, "x": 24, "y": 4}]})");
    CHECK_THROWS_WITH_AS(load_scene_spec(path), doctest::Contains("duplicate class_id"),
                         std::runtime_error);

    spit(path, R"({"format": "vidseg-scene", "version": 1, "width": 64})");
    CHECK_THROWS_AS(load_scene_spec(path), std::runtime_error);
}

TEST_CASE("sweep reports serialize to CSV") {
    TempDir dir;
    const fs::path path = dir.file("report.csv");

    IntervalReport baseline;
    baseline.scheme = SchemeMode::baseline;
    baseline.interval = 1;
    baseline.miou_avg = 90.125;
    baseline.miou_min = 90.125;
    baseline.fps = 12.5;
    baseline.per_offset = {90.125};

    IntervalReport prop;
    prop.scheme = SchemeMode::prop;
    prop.interval = 2;
    prop.miou_avg = 84.5;
    prop.miou_min = 80.25;
    prop.fps = 31.0;
    prop.per_offset = {88.75, 80.25};

    write_report_csv(std::vector<IntervalReport>{baseline, prop}, path);
    CHECK(slurp(path) ==
          "scheme,interval,miou_avg,miou_min,fps,offset_0,offset_1\n"
          "baseline,1,90.1250,90.1250,12.50,90.1250,\n"
          "prop,2,84.5000,80.2500,31.00,88.7500,80.2500\n");
}

TEST_CASE("sweep reports serialize to an SVG chart") {
    TempDir dir;
    const fs::path path = dir.file("report.svg");

    std::vector<IntervalReport> reports;
    for (int n : {1, 2, 4}) {
        IntervalReport r;
        r.scheme = SchemeMode::prop;
        r.interval = n;
        r.miou_avg = 90.0 - 3.0 * n;
        r.miou_min = r.miou_avg - 2.0;
        r.fps = 10.0 * n;
        r.per_offset.assign(static_cast<std::size_t>(n), r.miou_avg);
        reports.push_back(std::move(r));
    }
    IntervalReport base;
    base.scheme = SchemeMode::baseline;
    base.interval = 1;
    base.miou_avg = 91.0;
    base.miou_min = 91.0;
    base.fps = 11.0;
    base.per_offset = {91.0};
    reports.push_back(std::move(base));

    write_report_svg(reports, path);
    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
    // Two panels, each with one polyline per scheme.
    std::size_t polylines = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos;
         at = svg.find("<polyline", at + 1)) {
        ++polylines;
    }
    CHECK(polylines == 4);
    CHECK(svg.find("accuracy") != std::string::npos);
    CHECK(svg.find("throughput") != std::string::npos);

    // A single point per series still renders.
    write_report_svg({&reports.back(), 1}, path);
    CHECK(slurp(path).find("<circle") != std::string::npos);
}

}  // TEST_SUITE
