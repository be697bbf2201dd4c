#ifndef CARTOGAN_PIPELINE_HPP
#define CARTOGAN_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "cartogan/gan.hpp"
#include "cartogan/ismap.hpp"
#include "cartogan/manifest.hpp"
#include "cartogan/scene.hpp"

namespace cartogan::pipeline {

struct PipelineConfig {
    int version = 1;
    std::uint64_t seed = 42;
    int tile_size = 64;
    std::string image_format = "ppm"; // ppm | png
    std::vector<int> zooms = {15, 18};
    std::vector<int> tiles_per_zoom = {64, 256};
    double test_fraction = 0.2;
    int nonmap_count = 400;
    CityParams city;
    std::filesystem::path dataset_root = "out/dataset";
    std::filesystem::path checkpoint_root = "out/checkpoints";
    std::filesystem::path report_root = "out/reports";
    gan::TrainConfig pix2pix;  // kind/image_size filled automatically
    gan::TrainConfig cyclegan;
    ismap::IsMapConfig ismap_cfg;

    // Strict parse: unknown keys anywhere are errors.
    static PipelineConfig from_json_text(const std::string& text);
    static PipelineConfig from_file(const std::filesystem::path& path);
    void validate() const;

    int count_for_zoom(int zoom) const;
    std::filesystem::path tileset_root(const std::string& role) const;
    std::filesystem::path transfer_root(const std::string& model, int zoom) const;
    std::filesystem::path checkpoint_base(const std::string& model, int zoom) const;
    std::filesystem::path ismap_base() const;
};

// Worker-thread cap: CARTOGAN_THREADS, else min(hardware, 8), at least 1.
int worker_threads();

// Stage 1: one procedural scene, rendered under both built-in sheets with
// identical tile coordinates (exact pairing) plus the non-map texture set.
// Deterministic; rerunning reproduces every byte.
void cmd_dataset(const PipelineConfig& cfg);

// Stage 2: model is "pix2pix" or "cyclegan"; trains on the train split at
// the given zoom and writes checkpoint + loss CSV.
void cmd_train(const PipelineConfig& cfg, const std::string& model, int zoom);

// Applies the trained generator to the given split of the simple tileset
// (default: the held-out test tiles).
void cmd_transfer(const PipelineConfig& cfg, const std::string& model, int zoom,
                  const std::string& split = "test");

// Stage 3: classifier training on rendered map tiles vs non-map textures.
void cmd_train_ismap(const PipelineConfig& cfg);

// Transfer tiles as positives, held-out non-map textures as negatives.
ismap::EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::string& model, int zoom);

struct IngestResult {
    DatasetManifest manifest;
    std::vector<std::string> warnings; // rejected entries, one line each
};

// Builds a manifest from an existing z/x/y.<ppm|png> tree (all entries
// tagged train). Errors on an empty tree or mixed tile sizes.
IngestResult cmd_ingest(const std::filesystem::path& dir, const std::string& role);

} // namespace cartogan::pipeline

#endif
