#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vidseg/io.hpp"

namespace vidseg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

json load_document(const std::filesystem::path& path, const char* format) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(path, e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != format) {
        fail(path, std::string("not a ") + format + " document");
    }
    if (doc.value("version", 0) != 1) {
        fail(path, "unsupported version");
    }
    return doc;
}

void save_document(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out << doc.dump(2) << '\n';
    if (!out) fail(path, "write failed");
}

const char* fusion_name(FusionKind kind) { return to_string(kind); }

FusionKind fusion_from_name(const std::string& name, const std::filesystem::path& path) {
    if (name == "max") return FusionKind::max;
    if (name == "average") return FusionKind::average;
    if (name == "conv") return FusionKind::conv;
    fail(path, "unknown fusion kind '" + name + "'");
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
    json doc;
    doc["format"] = "vidseg-model";
    doc["version"] = 1;
    doc["toy"] = {
        {"channels", bundle.model.channels()},
        {"num_classes", bundle.model.num_classes()},
        {"centroids", bundle.model.centroids()},
    };
    json fusion;
    fusion["kind"] = fusion_name(bundle.fusion.kind);
    if (bundle.fusion.conv) {
        fusion["channels"] = bundle.fusion.conv->channels;
        fusion["weights"] = bundle.fusion.conv->weights;
        fusion["bias"] = bundle.fusion.conv->bias;
    }
    doc["fusion"] = std::move(fusion);
    save_document(doc, path);
}

ModelBundle load_model(const std::filesystem::path& path) {
    const json doc = load_document(path, "vidseg-model");
    try {
        const json& toy = doc.at("toy");
        const int channels = toy.at("channels").get<int>();
        const int num_classes = toy.at("num_classes").get<int>();
        auto centroids = toy.at("centroids").get<std::vector<double>>();
        ToyModel model(std::move(centroids), num_classes, channels);

        const json& fusion = doc.at("fusion");
        FusionWeights weights;
        weights.kind = fusion_from_name(fusion.at("kind").get<std::string>(), path);
        if (weights.kind == FusionKind::conv) {
            ConvKernel kernel;
            kernel.channels = fusion.at("channels").get<int>();
            kernel.weights = fusion.at("weights").get<std::vector<double>>();
            kernel.bias = fusion.at("bias").get<std::vector<double>>();
            kernel.validate();
            weights.conv = std::move(kernel);
        }
        return {std::move(model), std::move(weights)};
    } catch (const json::exception& e) {
        fail(path, e.what());
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

void save_scene_spec(const SceneSpec& spec, const std::filesystem::path& path) {
    json doc;
    doc["format"] = "vidseg-scene";
    doc["version"] = 1;
    doc["width"] = spec.width;
    doc["height"] = spec.height;
    doc["frame_count"] = spec.frame_count;
    doc["background_color"] = spec.background_color;
    doc["texture_amplitude"] = spec.texture_amplitude;
    doc["seed"] = spec.seed;
    json objects = json::array();
    for (const SceneObject& obj : spec.objects) {
        json o;
        o["shape"] = obj.shape == SceneObject::Shape::rect ? "rect" : "disk";
        o["class_id"] = obj.class_id;
        o["color"] = obj.color;
        o["size_w"] = obj.size_w;
        o["size_h"] = obj.size_h;
        o["x"] = obj.x;
        o["y"] = obj.y;
        o["vx"] = obj.vx;
        o["vy"] = obj.vy;
        if (obj.enter_frame != 0) o["enter_frame"] = obj.enter_frame;
        if (obj.exit_frame != std::numeric_limits<int>::max()) o["exit_frame"] = obj.exit_frame;
        objects.push_back(std::move(o));
    }
    doc["objects"] = std::move(objects);
    save_document(doc, path);
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    const json doc = load_document(path, "vidseg-scene");
    try {
        SceneSpec spec;
        spec.width = doc.at("width").get<int>();
        spec.height = doc.at("height").get<int>();
        spec.frame_count = doc.at("frame_count").get<int>();
        spec.background_color = doc.at("background_color").get<std::array<std::uint8_t, 3>>();
        spec.texture_amplitude = doc.value("texture_amplitude", 0);
        spec.seed = doc.value("seed", 1u);
        spec.objects.clear();
        for (const json& o : doc.at("objects")) {
            SceneObject obj;
            const std::string shape = o.at("shape").get<std::string>();
            if (shape == "rect") {
                obj.shape = SceneObject::Shape::rect;
            } else if (shape == "disk") {
                obj.shape = SceneObject::Shape::disk;
            } else {
                fail(path, "unknown shape '" + shape + "'");
            }
            obj.class_id = o.at("class_id").get<int>();
            obj.color = o.at("color").get<std::array<std::uint8_t, 3>>();
            obj.size_w = o.at("size_w").get<double>();
            obj.size_h = o.value("size_h", obj.size_w);
            obj.x = o.at("x").get<double>();
            obj.y = o.at("y").get<double>();
            obj.vx = o.value("vx", 0.0);
            obj.vy = o.value("vy", 0.0);
            obj.enter_frame = o.value("enter_frame", 0);
            obj.exit_frame = o.value("exit_frame", std::numeric_limits<int>::max());
            spec.objects.push_back(obj);
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        fail(path, e.what());
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

}  // namespace vidseg
