#include "mscope/manifest.hpp"

#include "mscope/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace mscope {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(std::string("schema violation: missing '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_string()) throw DataError(std::string("schema violation: '") + key + "' must be a string");
    return v.get<std::string>();
}

std::int64_t require_int(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_integer()) throw DataError(std::string("schema violation: '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::size_t require_count(const json& obj, const char* key) {
    const auto v = require_int(obj, key);
    if (v < 0) throw DataError(std::string("schema violation: '") + key + "' must be nonnegative");
    return static_cast<std::size_t>(v);
}

} // namespace

void validate_manifest(const RunManifest& manifest) {
    if (manifest.test_mse && (!std::isfinite(*manifest.test_mse) || *manifest.test_mse < 0.0))
        throw DataError("test_mse must be finite and nonnegative");
    std::set<std::size_t> seen;
    std::size_t previous = 0;
    for (const auto& layer : manifest.layers) {
        if (!seen.insert(layer.index).second) throw DataError("duplicate layer index");
        if (layer.index < 1) throw DataError("layer indices start at 1");
        if (layer.index <= previous) throw DataError("layer indices must be strictly increasing");
        previous = layer.index;
    }
    if (!manifest.layers.empty() && manifest.layers.front().index != 1)
        throw DataError("layer indices start at 1");
}

RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw DataError("schema violation: manifest must be an object");

    RunManifest m;
    m.model = require_string(doc, "model");
    m.dataset = require_string(doc, "dataset");
    m.lookback = require_count(doc, "lookback");
    m.horizon = require_count(doc, "horizon");
    m.seed = require_int(doc, "seed");
    if (doc.contains("epoch") && !doc["epoch"].is_null()) m.epoch = require_count(doc, "epoch");
    if (doc.contains("test_mse") && !doc["test_mse"].is_null()) {
        if (!doc["test_mse"].is_number()) throw DataError("schema violation: 'test_mse' must be a number");
        m.test_mse = doc["test_mse"].get<double>();
    }

    const json& layers = require(doc, "layers");
    if (!layers.is_array()) throw DataError("schema violation: 'layers' must be an array");
    const auto base = path.parent_path();
    for (const auto& item : layers) {
        if (!item.is_object()) throw DataError("schema violation: layer entries must be objects");
        LayerEntry layer;
        layer.index = require_count(item, "index");
        layer.name = require_string(item, "name");
        std::filesystem::path file = require_string(item, "file");
        layer.file = file.is_absolute() ? file : base / file;
        m.layers.push_back(std::move(layer));
    }
    validate_manifest(m);
    for (const auto& layer : m.layers)
        if (!std::filesystem::exists(layer.file))
            throw DataError("missing layer file " + layer.file.string());
    return m;
}

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    validate_manifest(manifest);
    json doc;
    doc["model"] = manifest.model;
    doc["dataset"] = manifest.dataset;
    doc["lookback"] = manifest.lookback;
    doc["horizon"] = manifest.horizon;
    doc["seed"] = manifest.seed;
    if (manifest.epoch) doc["epoch"] = *manifest.epoch;
    if (manifest.test_mse) doc["test_mse"] = *manifest.test_mse;
    json layers = json::array();
    const auto base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    for (const auto& layer : manifest.layers) {
        std::filesystem::path file = layer.file;
        if (file.is_absolute()) {
            auto rel = file.lexically_relative(std::filesystem::absolute(base));
            if (!rel.empty() && *rel.begin() != "..") file = rel;
        } else if (!path.parent_path().empty()) {
            auto rel = file.lexically_relative(path.parent_path());
            if (!rel.empty() && *rel.begin() != "..") file = rel;
        }
        layers.push_back({{"index", layer.index}, {"name", layer.name}, {"file", file.generic_string()}});
    }
    doc["layers"] = std::move(layers);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("write failure on " + path.string());
}

} // namespace mscope
