#ifndef CARTOGAN_MANIFEST_HPP
#define CARTOGAN_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cartogan/tile_geometry.hpp"

namespace cartogan {

struct ManifestEntry {
    TileCoord coord;
    std::string path; // relative to the tileset root
    std::string sha256;
    std::string split; // "train" | "test"
};

// Inventory of one tileset: role, provenance and per-tile integrity hashes.
struct DatasetManifest {
    int version = 1;
    std::string role; // simple | target | transfer | nonmap
    std::uint64_t seed = 0;
    std::string stylesheet;
    int tile_size = 0;
    std::vector<int> zooms;
    std::vector<ManifestEntry> tiles;

    std::vector<ManifestEntry> split_entries(const std::string& split) const;
    std::vector<ManifestEntry> zoom_entries(int zoom, const std::string& split = "") const;
};

bool is_valid_role(const std::string& role);

// Writes <root>/manifest.json with entries sorted by coordinate.
void save_manifest(const std::filesystem::path& root, const DatasetManifest& m);

// Loads and, when verify is set, checks that every tile exists and matches
// its recorded hash; mismatches raise with the offending path.
DatasetManifest load_manifest(const std::filesystem::path& root, bool verify = true);

} // namespace cartogan

#endif
