#include "cartogan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "cartogan/hash.hpp"
#include "cartogan/image_tensor.hpp"
#include "cartogan/nonmap.hpp"
#include "cartogan/render.hpp"
#include "cartogan/rng.hpp"

namespace cartogan::pipeline {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTagTilePick = 0xD1;
constexpr std::uint64_t kTagSplit = 0xD2;
constexpr std::uint64_t kTagNonmap = 0xD3;
constexpr std::uint64_t kTagNonmapSplit = 0xD4;
constexpr std::uint64_t kTagTrainSeed = 0xD5;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw std::invalid_argument("config: unknown key '" +
                                        (where.empty() ? key : where + "." + key) + "'");
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

// Seed 0 in a train section means "derive from the pipeline seed".
gan::TrainConfig train_section_defaults(const std::string& kind) {
    gan::TrainConfig c;
    c.kind = kind;
    c.seed = 0;
    return c;
}

gan::TrainConfig parse_train_section(const json& j, const std::string& kind,
                                     const std::string& where, bool with_cyc) {
    gan::TrainConfig c = train_section_defaults(kind);
    std::set<std::string> allowed{"epochs", "lr",       "beta1",    "beta2",
                                  "seed",   "lambda_l1", "checkpoint_interval",
                                  "gen_base", "disc_base"};
    if (with_cyc) allowed.insert("lambda_cyc");
    check_keys(j, allowed, where);
    get_if(j, "epochs", c.epochs);
    get_if(j, "lr", c.lr);
    get_if(j, "beta1", c.beta1);
    get_if(j, "beta2", c.beta2);
    get_if(j, "seed", c.seed);
    get_if(j, "lambda_l1", c.lambda_l1);
    if (with_cyc) get_if(j, "lambda_cyc", c.lambda_cyc);
    get_if(j, "checkpoint_interval", c.checkpoint_interval);
    get_if(j, "gen_base", c.gen_base);
    get_if(j, "disc_base", c.disc_base);
    return c;
}

std::string format_ext(const PipelineConfig& cfg) { return "." + cfg.image_format; }

// Runs jobs [0, count) over the worker pool in arbitrary order; results must
// not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    int threads = std::min<std::size_t>(worker_threads(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (!failed.load()) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    failed.store(true);
                    if (error.empty()) error = e.what();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error(error);
}

std::filesystem::path tile_rel_path(const TileCoord& c, const std::string& ext) {
    return std::filesystem::path(std::to_string(c.z)) / std::to_string(c.x) /
           (std::to_string(c.y) + ext);
}

// All tiles of the zoom whose bounds lie fully inside the box, sorted.
std::vector<TileCoord> tiles_fully_inside(const GeoBounds& box, int zoom) {
    double ext = (2.0 * kWorldHalfM) / double(std::int64_t(1) << zoom);
    auto first_inside = [&](double lo) { return std::int64_t(std::ceil((lo + kWorldHalfM) / ext)); };
    auto last_inside = [&](double hi) {
        return std::int64_t(std::floor((hi + kWorldHalfM) / ext)) - 1;
    };
    std::int64_t x0 = first_inside(box.min.x), x1 = last_inside(box.max.x);
    // Row indices grow southward: tile row y spans [half - (y+1)ext, half - y ext].
    std::int64_t y0 = std::int64_t(std::ceil((kWorldHalfM - box.max.y) / ext));
    std::int64_t y1 = std::int64_t(std::floor((kWorldHalfM - box.min.y) / ext)) - 1;
    std::vector<TileCoord> out;
    std::int64_t n = std::int64_t(1) << zoom;
    for (std::int64_t y = std::max<std::int64_t>(0, y0); y <= std::min(n - 1, y1); ++y)
        for (std::int64_t x = std::max<std::int64_t>(0, x0); x <= std::min(n - 1, x1); ++x)
            out.push_back(TileCoord{zoom, std::int32_t(x), std::int32_t(y)});
    return out;
}

struct PlannedTile {
    TileCoord coord;
    std::string split;
};

// Deterministic tile selection and train/test tagging for one zoom.
std::vector<PlannedTile> plan_zoom(const PipelineConfig& cfg, const GeoBounds& scene_bounds,
                                   int zoom, int count) {
    auto all = tiles_fully_inside(scene_bounds, zoom);
    if (int(all.size()) < count)
        throw std::runtime_error("dataset: scene holds only " + std::to_string(all.size()) +
                                 " z" + std::to_string(zoom) + " tiles, config wants " +
                                 std::to_string(count));
    Rng pick = Rng::from_key(cfg.seed, kTagTilePick, std::uint64_t(zoom));
    pick.shuffle(all);
    all.resize(std::size_t(count));
    std::sort(all.begin(), all.end());

    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split = Rng::from_key(cfg.seed, kTagSplit, std::uint64_t(zoom));
    split.shuffle(order);
    std::size_t test_count = std::size_t(std::llround(cfg.test_fraction * double(count)));
    std::vector<PlannedTile> out(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) out[i] = {all[i], "train"};
    for (std::size_t i = 0; i < test_count; ++i) out[order[i]].split = "test";
    return out;
}

GeoBounds scene_bounds_for(const PipelineConfig& cfg) {
    double width = 0;
    for (std::size_t i = 0; i < cfg.zooms.size(); ++i) {
        double ext = (2.0 * kWorldHalfM) / double(std::int64_t(1) << cfg.zooms[i]);
        int side = int(std::ceil(std::sqrt(double(cfg.tiles_per_zoom[i]))));
        width = std::max(width, double(side + 1) * ext);
    }
    return GeoBounds{{-width / 2, -width / 2}, {width / 2, width / 2}};
}

std::vector<RasterTile> load_tiles(const std::filesystem::path& root,
                                   const std::vector<ManifestEntry>& entries) {
    std::vector<RasterTile> out(entries.size());
    parallel_for(entries.size(), [&](std::size_t i) { out[i] = read_image(root / entries[i].path); });
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

gan::TrainConfig effective_train_config(const PipelineConfig& cfg, const std::string& model,
                                        int zoom) {
    gan::TrainConfig tc = model == "pix2pix" ? cfg.pix2pix : cfg.cyclegan;
    tc.image_size = cfg.tile_size;
    if (tc.seed == 0)
        tc.seed = Rng::from_key(cfg.seed, kTagTrainSeed, fnv1a(model), std::uint64_t(zoom)).state();
    return tc;
}

void require_artifact(const std::filesystem::path& p, const std::string& hint) {
    if (!std::filesystem::exists(p))
        throw std::runtime_error("missing " + hint + ": " + p.string() +
                                 " (run the producing command first)");
}

} // namespace

int worker_threads() {
    if (const char* env = std::getenv("CARTOGAN_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return int(std::min(hw == 0 ? 1u : hw, 8u));
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid json: ") + e.what());
    }
    check_keys(j,
               {"version", "seed", "tile_size", "image_format", "zooms", "tiles_per_zoom",
                "test_fraction", "nonmap_count", "city", "paths", "pix2pix", "cyclegan", "ismap"},
               "");
    if (!j.contains("version")) throw std::invalid_argument("config: missing 'version'");
    PipelineConfig c;
    c.version = j.at("version").get<int>();
    if (c.version != 1) throw std::invalid_argument("config: unsupported version");
    get_if(j, "seed", c.seed);
    get_if(j, "tile_size", c.tile_size);
    get_if(j, "image_format", c.image_format);
    get_if(j, "zooms", c.zooms);
    get_if(j, "tiles_per_zoom", c.tiles_per_zoom);
    get_if(j, "test_fraction", c.test_fraction);
    get_if(j, "nonmap_count", c.nonmap_count);
    if (j.contains("city")) {
        const json& cj = j.at("city");
        check_keys(cj,
                   {"block_size_m", "road_jitter", "building_density", "park_probability",
                    "water_probability", "poi_density"},
                   "city");
        get_if(cj, "block_size_m", c.city.block_size_m);
        get_if(cj, "road_jitter", c.city.road_jitter);
        get_if(cj, "building_density", c.city.building_density);
        get_if(cj, "park_probability", c.city.park_probability);
        get_if(cj, "water_probability", c.city.water_probability);
        get_if(cj, "poi_density", c.city.poi_density);
    }
    if (j.contains("paths")) {
        const json& pj = j.at("paths");
        check_keys(pj, {"dataset_root", "checkpoint_root", "report_root"}, "paths");
        if (pj.contains("dataset_root")) c.dataset_root = pj.at("dataset_root").get<std::string>();
        if (pj.contains("checkpoint_root"))
            c.checkpoint_root = pj.at("checkpoint_root").get<std::string>();
        if (pj.contains("report_root")) c.report_root = pj.at("report_root").get<std::string>();
    }
    c.pix2pix = j.contains("pix2pix")
                    ? parse_train_section(j.at("pix2pix"), "pix2pix", "pix2pix", false)
                    : train_section_defaults("pix2pix");
    c.cyclegan = j.contains("cyclegan")
                     ? parse_train_section(j.at("cyclegan"), "cyclegan", "cyclegan", true)
                     : train_section_defaults("cyclegan");
    if (j.contains("ismap")) {
        const json& ij = j.at("ismap");
        check_keys(ij, {"epochs", "lr", "beta1", "beta2", "seed", "holdout_fraction"}, "ismap");
        get_if(ij, "epochs", c.ismap_cfg.epochs);
        get_if(ij, "lr", c.ismap_cfg.lr);
        get_if(ij, "beta1", c.ismap_cfg.beta1);
        get_if(ij, "beta2", c.ismap_cfg.beta2);
        get_if(ij, "seed", c.ismap_cfg.seed);
        get_if(ij, "holdout_fraction", c.ismap_cfg.holdout_fraction);
    }
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

void PipelineConfig::validate() const {
    if (!is_valid_tile_size(tile_size))
        throw std::invalid_argument("config: tile_size must be 64, 128 or 256");
    if (image_format != "ppm" && image_format != "png")
        throw std::invalid_argument("config: image_format must be ppm or png");
    if (zooms.empty() || zooms.size() != tiles_per_zoom.size())
        throw std::invalid_argument("config: zooms and tiles_per_zoom must align and be non-empty");
    std::set<int> seen;
    for (std::size_t i = 0; i < zooms.size(); ++i) {
        if (zooms[i] < 0 || zooms[i] > kMaxZoom)
            throw std::invalid_argument("config: zoom outside [0, 20]");
        if (!seen.insert(zooms[i]).second)
            throw std::invalid_argument("config: duplicate zoom level");
        if (tiles_per_zoom[i] <= 0)
            throw std::invalid_argument("config: tile counts must be positive");
    }
    if (test_fraction < 0 || test_fraction >= 1)
        throw std::invalid_argument("config: test_fraction must be in [0, 1)");
    if (nonmap_count <= 0) throw std::invalid_argument("config: nonmap_count must be positive");
    std::set<std::string> roots{dataset_root.string(), checkpoint_root.string(),
                                report_root.string()};
    if (roots.size() != 3)
        throw std::invalid_argument("config: dataset/checkpoint/report roots must be distinct");
}

int PipelineConfig::count_for_zoom(int zoom) const {
    for (std::size_t i = 0; i < zooms.size(); ++i)
        if (zooms[i] == zoom) return tiles_per_zoom[i];
    throw std::invalid_argument("zoom " + std::to_string(zoom) + " is not in the config");
}

std::filesystem::path PipelineConfig::tileset_root(const std::string& role) const {
    return dataset_root / role;
}

std::filesystem::path PipelineConfig::transfer_root(const std::string& model, int zoom) const {
    return dataset_root / ("transfer_" + model + "_z" + std::to_string(zoom));
}

std::filesystem::path PipelineConfig::checkpoint_base(const std::string& model, int zoom) const {
    return checkpoint_root / (model + "_z" + std::to_string(zoom));
}

std::filesystem::path PipelineConfig::ismap_base() const { return checkpoint_root / "ismap"; }

void cmd_dataset(const PipelineConfig& cfg) {
    cfg.validate();
    GeoBounds bounds = scene_bounds_for(cfg);
    VectorScene scene = generate_city(cfg.seed, bounds, cfg.city);
    std::printf("dataset: scene %zu features over %.1f x %.1f km\n", scene.features.size(),
                bounds.width() / 1000.0, bounds.height() / 1000.0);

    std::vector<std::pair<int, std::vector<PlannedTile>>> plans;
    for (std::size_t i = 0; i < cfg.zooms.size(); ++i)
        plans.push_back({cfg.zooms[i], plan_zoom(cfg, bounds, cfg.zooms[i], cfg.tiles_per_zoom[i])});

    std::string ext = format_ext(cfg);
    for (const std::string role : {"simple", "target"}) {
        const StyleSheet& sheet =
            role == "simple" ? *find_builtin_sheet("simple-v1") : *find_builtin_sheet("target-v1");
        auto root = cfg.tileset_root(role);
        std::filesystem::create_directories(root);

        struct Job {
            TileCoord coord;
            std::string split;
        };
        std::vector<Job> jobs;
        for (const auto& [zoom, tiles] : plans) {
            (void)zoom;
            for (const auto& t : tiles) jobs.push_back({t.coord, t.split});
        }
        std::vector<ManifestEntry> entries(jobs.size());
        parallel_for(jobs.size(), [&](std::size_t i) {
            const TileCoord& t = jobs[i].coord;
            double margin = render_clip_margin_m(t, sheet, cfg.tile_size);
            VectorScene clipped = clip_scene(scene, t, margin);
            RasterTile img = render_tile(clipped, t, sheet, cfg.tile_size);
            auto rel = tile_rel_path(t, ext);
            auto file = root / rel;
            std::filesystem::create_directories(file.parent_path());
            write_image(file, img);
            entries[i] = {t, rel.generic_string(), sha256_file(file), jobs[i].split};
        });

        DatasetManifest m;
        m.role = role;
        m.seed = cfg.seed;
        m.stylesheet = sheet.id;
        m.tile_size = cfg.tile_size;
        m.zooms = cfg.zooms;
        m.tiles = std::move(entries);
        save_manifest(root, m);
        std::printf("dataset: wrote %zu %s tiles under %s\n", m.tiles.size(), role.c_str(),
                    root.string().c_str());
    }

    // Non-map textures; synthetic z20 coordinates just index the files.
    {
        auto root = cfg.tileset_root("nonmap");
        std::filesystem::create_directories(root);
        std::vector<ManifestEntry> entries(std::size_t(cfg.nonmap_count));
        std::vector<std::size_t> order(entries.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng split = Rng::from_key(cfg.seed, kTagNonmapSplit);
        split.shuffle(order);
        std::size_t test_count =
            std::size_t(std::llround(cfg.test_fraction * double(cfg.nonmap_count)));
        std::vector<std::string> splits(entries.size(), "train");
        for (std::size_t i = 0; i < test_count; ++i) splits[order[i]] = "test";

        parallel_for(entries.size(), [&](std::size_t i) {
            RasterTile img =
                nonmap_texture(Rng::from_key(cfg.seed, kTagNonmap, i).state(), cfg.tile_size);
            TileCoord c{20, std::int32_t(i), 0};
            auto rel = tile_rel_path(c, ext);
            auto file = root / rel;
            std::filesystem::create_directories(file.parent_path());
            write_image(file, img);
            entries[i] = {c, rel.generic_string(), sha256_file(file), splits[i]};
        });
        DatasetManifest m;
        m.role = "nonmap";
        m.seed = cfg.seed;
        m.stylesheet = "nonmap-v1";
        m.tile_size = cfg.tile_size;
        m.zooms = {20};
        m.tiles = std::move(entries);
        save_manifest(root, m);
        std::printf("dataset: wrote %d nonmap textures under %s\n", cfg.nonmap_count,
                    root.string().c_str());
    }
}

void cmd_train(const PipelineConfig& cfg, const std::string& model, int zoom) {
    if (model != "pix2pix" && model != "cyclegan")
        throw std::invalid_argument("train: model must be pix2pix or cyclegan");
    require_artifact(cfg.tileset_root("simple") / "manifest.json", "simple tileset manifest");
    require_artifact(cfg.tileset_root("target") / "manifest.json", "target tileset manifest");
    DatasetManifest simple = load_manifest(cfg.tileset_root("simple"));
    DatasetManifest target = load_manifest(cfg.tileset_root("target"));
    auto simple_entries = simple.zoom_entries(zoom, "train");
    auto target_entries = target.zoom_entries(zoom, "train");
    if (simple_entries.empty() || target_entries.empty())
        throw std::runtime_error("train: no train tiles at zoom " + std::to_string(zoom));

    gan::TrainConfig tc = effective_train_config(cfg, model, zoom);
    std::filesystem::create_directories(cfg.checkpoint_root);
    auto base = cfg.checkpoint_base(model, zoom);
    auto progress = [&](const gan::EpochLoss& e) {
        std::printf("epoch=%d loss_g=%.6f loss_d=%.6f\n", e.epoch, e.g, e.d);
        std::fflush(stdout);
    };

    if (model == "pix2pix") {
        if (simple_entries.size() != target_entries.size())
            throw std::runtime_error("train: pairing mismatch between simple and target tilesets");
        auto simple_tiles = load_tiles(cfg.tileset_root("simple"), simple_entries);
        auto target_tiles = load_tiles(cfg.tileset_root("target"), target_entries);
        std::vector<std::pair<gan::FTensor, gan::FTensor>> pairs;
        for (std::size_t i = 0; i < simple_entries.size(); ++i) {
            if (!(simple_entries[i].coord == target_entries[i].coord))
                throw std::runtime_error("train: pairing mismatch at " +
                                         simple_entries[i].coord.str());
            pairs.push_back({tile_to_tensor(simple_tiles[i]), tile_to_tensor(target_tiles[i])});
        }
        gan::Pix2PixTrainer trainer(tc);
        trainer.set_pairs(std::move(pairs));
        for (int e = 0; e < tc.epochs; ++e) {
            trainer.train(1, progress);
            if (tc.checkpoint_interval > 0 && trainer.epoch() % tc.checkpoint_interval == 0 &&
                trainer.epoch() < tc.epochs) {
                auto snap = base;
                snap += "_e" + std::to_string(trainer.epoch());
                trainer.save(snap);
            }
        }
        trainer.save(base);
        auto csv = base;
        csv += "_loss.csv";
        gan::write_loss_csv(csv, tc.kind, trainer.history());
    } else {
        auto xs_tiles = load_tiles(cfg.tileset_root("simple"), simple_entries);
        auto ys_tiles = load_tiles(cfg.tileset_root("target"), target_entries);
        std::vector<gan::FTensor> xs, ys;
        for (const auto& t : xs_tiles) xs.push_back(tile_to_tensor(t));
        for (const auto& t : ys_tiles) ys.push_back(tile_to_tensor(t));
        gan::CycleGanTrainer trainer(tc);
        trainer.set_data(std::move(xs), std::move(ys));
        for (int e = 0; e < tc.epochs; ++e) {
            trainer.train(1, progress);
            if (tc.checkpoint_interval > 0 && trainer.epoch() % tc.checkpoint_interval == 0 &&
                trainer.epoch() < tc.epochs) {
                auto snap = base;
                snap += "_e" + std::to_string(trainer.epoch());
                trainer.save(snap);
            }
        }
        trainer.save(base);
        auto csv = base;
        csv += "_loss.csv";
        gan::write_loss_csv(csv, tc.kind, trainer.history());
    }
    std::printf("train: checkpoint at %s.cgt\n", base.string().c_str());
}

void cmd_transfer(const PipelineConfig& cfg, const std::string& model, int zoom,
                  const std::string& split) {
    auto base = cfg.checkpoint_base(model, zoom);
    auto ckpt = base;
    ckpt += ".json";
    require_artifact(ckpt, "checkpoint for " + model + " at zoom " + std::to_string(zoom));
    gan::LoadedGenerator gen = gan::load_generator(base);

    require_artifact(cfg.tileset_root("simple") / "manifest.json", "simple tileset manifest");
    DatasetManifest simple = load_manifest(cfg.tileset_root("simple"));
    auto entries = simple.zoom_entries(zoom, split);
    auto tiles = load_tiles(cfg.tileset_root("simple"), entries);

    auto root = cfg.transfer_root(model, zoom);
    std::filesystem::create_directories(root);
    std::string ext = format_ext(cfg);
    std::vector<ManifestEntry> out_entries(entries.size());
    parallel_for(entries.size(), [&](std::size_t i) {
        RasterTile styled = gan::apply_generator(gen.net, tiles[i]);
        auto rel = tile_rel_path(entries[i].coord, ext);
        auto file = root / rel;
        std::filesystem::create_directories(file.parent_path());
        write_image(file, styled);
        out_entries[i] = {entries[i].coord, rel.generic_string(), sha256_file(file),
                          entries[i].split};
    });

    DatasetManifest m;
    m.role = "transfer";
    m.seed = cfg.seed;
    m.stylesheet = "transfer:" + model;
    m.tile_size = cfg.tile_size;
    m.zooms = {zoom};
    m.tiles = std::move(out_entries);
    save_manifest(root, m);
    std::printf("transfer: wrote %zu tiles under %s\n", m.tiles.size(), root.string().c_str());
}

void cmd_train_ismap(const PipelineConfig& cfg) {
    require_artifact(cfg.tileset_root("simple") / "manifest.json", "simple tileset manifest");
    require_artifact(cfg.tileset_root("target") / "manifest.json", "target tileset manifest");
    require_artifact(cfg.tileset_root("nonmap") / "manifest.json", "nonmap tileset manifest");
    DatasetManifest simple = load_manifest(cfg.tileset_root("simple"));
    DatasetManifest target = load_manifest(cfg.tileset_root("target"));
    DatasetManifest nonmap = load_manifest(cfg.tileset_root("nonmap"));

    std::vector<RasterTile> maps;
    for (const auto& e : simple.split_entries("train"))
        maps.push_back(read_image(cfg.tileset_root("simple") / e.path));
    for (const auto& e : target.split_entries("train"))
        maps.push_back(read_image(cfg.tileset_root("target") / e.path));
    std::vector<RasterTile> non_maps;
    for (const auto& e : nonmap.split_entries("train"))
        non_maps.push_back(read_image(cfg.tileset_root("nonmap") / e.path));

    ismap::IsMapClassifier clf(cfg.ismap_cfg);
    double acc = clf.train(maps, non_maps, [](int epoch, double loss, double holdout) {
        std::printf("epoch=%d loss=%.6f holdout_accuracy=%.4f\n", epoch, loss, holdout);
        std::fflush(stdout);
    });
    std::filesystem::create_directories(cfg.checkpoint_root);
    clf.save(cfg.ismap_base());
    std::printf("train-ismap: held-out accuracy %.4f, checkpoint at %s.cgt\n", acc,
                cfg.ismap_base().string().c_str());
}

ismap::EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::string& model, int zoom) {
    auto clf_json = cfg.ismap_base();
    clf_json += ".json";
    require_artifact(clf_json, "classifier checkpoint");
    require_artifact(cfg.transfer_root(model, zoom) / "manifest.json",
                     "transfer tileset for " + model + " at zoom " + std::to_string(zoom));
    ismap::IsMapClassifier clf = ismap::IsMapClassifier::load(cfg.ismap_base());
    DatasetManifest transfer = load_manifest(cfg.transfer_root(model, zoom));
    DatasetManifest nonmap = load_manifest(cfg.tileset_root("nonmap"));

    std::vector<RasterTile> positives;
    for (const auto& e : transfer.tiles)
        positives.push_back(read_image(cfg.transfer_root(model, zoom) / e.path));
    std::vector<RasterTile> negatives;
    for (const auto& e : nonmap.split_entries("test"))
        negatives.push_back(read_image(cfg.tileset_root("nonmap") / e.path));

    ismap::EvalReport report = clf.evaluate(positives, negatives);
    std::filesystem::create_directories(cfg.report_root);
    auto report_path = cfg.report_root / ("eval_" + model + "_z" + std::to_string(zoom) + ".json");
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("evaluate: cannot write " + report_path.string());
    out << report.to_json();
    std::printf("%s", ismap::EvalReport::table(
                          {{model + " z" + std::to_string(zoom), report}})
                          .c_str());
    std::printf("evaluate: report at %s\n", report_path.string().c_str());
    return report;
}

IngestResult cmd_ingest(const std::filesystem::path& dir, const std::string& role) {
    if (!is_valid_role(role)) throw std::invalid_argument("ingest: unknown role '" + role + "'");
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("ingest: not a directory: " + dir.string());

    IngestResult result;
    int tile_size = 0;
    std::set<int> zooms;
    for (auto it = std::filesystem::recursive_directory_iterator(dir);
         it != std::filesystem::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        auto rel = std::filesystem::relative(it->path(), dir).generic_string();
        if (rel == "manifest.json") continue;
        auto ext = it->path().extension().string();
        if (ext != ".ppm" && ext != ".png") {
            result.warnings.push_back(rel + ": unsupported extension");
            continue;
        }
        std::string stem = rel.substr(0, rel.size() - ext.size());
        auto coord = TileCoord::parse(stem);
        if (!coord) {
            result.warnings.push_back(rel + ": path is not z/x/y");
            continue;
        }
        RasterTile img;
        try {
            img = read_image(it->path());
        } catch (const std::exception& e) {
            result.warnings.push_back(rel + ": " + e.what());
            continue;
        }
        if (img.width != img.height || !is_valid_tile_size(img.width)) {
            result.warnings.push_back(rel + ": unsupported dimensions " +
                                      std::to_string(img.width) + "x" + std::to_string(img.height));
            continue;
        }
        if (tile_size == 0) tile_size = img.width;
        if (img.width != tile_size)
            throw std::runtime_error("ingest: mixed tile sizes (" + std::to_string(tile_size) +
                                     " and " + std::to_string(img.width) + ")");
        zooms.insert(coord->z);
        result.manifest.tiles.push_back({*coord, rel, sha256_file(it->path()), "train"});
    }
    if (result.manifest.tiles.empty()) throw std::runtime_error("ingest: no usable tiles in " + dir.string());
    result.manifest.role = role;
    result.manifest.seed = 0;
    result.manifest.stylesheet = "ingested";
    result.manifest.tile_size = tile_size;
    result.manifest.zooms.assign(zooms.begin(), zooms.end());
    save_manifest(dir, result.manifest);
    // Directory iteration order is unspecified; keep outputs deterministic.
    std::sort(result.manifest.tiles.begin(), result.manifest.tiles.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.coord < b.coord; });
    std::sort(result.warnings.begin(), result.warnings.end());
    return result;
}

} // namespace cartogan::pipeline
