#include "cartogan/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cartogan/hash.hpp"

namespace cartogan {

using nlohmann::json;

bool is_valid_role(const std::string& role) {
    return role == "simple" || role == "target" || role == "transfer" || role == "nonmap";
}

std::vector<ManifestEntry> DatasetManifest::split_entries(const std::string& split) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : tiles)
        if (split.empty() || e.split == split) out.push_back(e);
    return out;
}

std::vector<ManifestEntry> DatasetManifest::zoom_entries(int zoom, const std::string& split) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : tiles)
        if (e.coord.z == zoom && (split.empty() || e.split == split)) out.push_back(e);
    return out;
}

void save_manifest(const std::filesystem::path& root, const DatasetManifest& m) {
    if (!is_valid_role(m.role))
        throw std::invalid_argument("manifest: unknown role '" + m.role + "'");
    DatasetManifest sorted = m;
    std::sort(sorted.tiles.begin(), sorted.tiles.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.coord < b.coord; });
    json tiles = json::array();
    for (const auto& e : sorted.tiles) {
        if (e.split != "train" && e.split != "test")
            throw std::invalid_argument("manifest: bad split tag '" + e.split + "'");
        tiles.push_back(json{{"coord", e.coord.str()},
                             {"path", e.path},
                             {"sha256", e.sha256},
                             {"split", e.split}});
    }
    json j{{"version", sorted.version}, {"role", sorted.role},       {"seed", sorted.seed},
           {"stylesheet", sorted.stylesheet}, {"tile_size", sorted.tile_size},
           {"zooms", sorted.zooms},      {"tiles", tiles}};
    std::filesystem::create_directories(root);
    std::ofstream out(root / "manifest.json");
    if (!out) throw std::runtime_error("manifest: cannot write " + (root / "manifest.json").string());
    out << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::filesystem::path& root, bool verify) {
    auto path = root / "manifest.json";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("manifest: invalid json in " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw std::runtime_error("manifest: unsupported version");
    m.role = j.at("role").get<std::string>();
    if (!is_valid_role(m.role)) throw std::runtime_error("manifest: unknown role '" + m.role + "'");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.stylesheet = j.at("stylesheet").get<std::string>();
    m.tile_size = j.at("tile_size").get<int>();
    m.zooms = j.at("zooms").get<std::vector<int>>();
    for (const auto& e : j.at("tiles")) {
        ManifestEntry me;
        auto coord = TileCoord::parse(e.at("coord").get<std::string>());
        if (!coord)
            throw std::runtime_error("manifest: bad coord '" + e.at("coord").get<std::string>() +
                                     "' in " + path.string());
        me.coord = *coord;
        me.path = e.at("path").get<std::string>();
        me.sha256 = e.at("sha256").get<std::string>();
        me.split = e.at("split").get<std::string>();
        if (me.split != "train" && me.split != "test")
            throw std::runtime_error("manifest: bad split tag for " + me.path);
        if (verify) {
            auto file = root / me.path;
            if (!std::filesystem::exists(file))
                throw std::runtime_error("manifest: missing tile file " + file.string());
            auto actual = sha256_file(file);
            if (actual != me.sha256)
                throw std::runtime_error("manifest: hash mismatch for " + file.string());
        }
        m.tiles.push_back(std::move(me));
    }
    return m;
}

} // namespace cartogan
