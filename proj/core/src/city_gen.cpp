#include "cartogan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cartogan/rng.hpp"

namespace cartogan {

namespace {

// Lot-grid constants. building_capacity() mirrors the same arithmetic, so
// any change here must be made there as well.
constexpr double kLotTargetM = 30.0;     // preferred lot edge
constexpr double kBlockMarginFrac = 0.12; // road reserve inside a block
constexpr double kBuildingGapFrac = 0.12; // gap between lot edge and footprint

// Stream tags for Rng::from_key.
constexpr std::uint64_t kTagCrossing = 0xC1;
constexpr std::uint64_t kTagBlock = 0xB1;
constexpr std::uint64_t kTagLot = 0xB2;
constexpr std::uint64_t kTagPoi = 0xB3;

struct Grid {
    double minx, miny;
    double block;
    int nx, ny; // grid line counts are nx+1, ny+1
};

Grid make_grid(const GeoBounds& bounds, const CityParams& p) {
    Grid g;
    g.minx = bounds.min.x;
    g.miny = bounds.min.y;
    g.block = p.block_size_m;
    g.nx = int(std::floor(bounds.width() / p.block_size_m));
    g.ny = int(std::floor(bounds.height() / p.block_size_m));
    return g;
}

MercatorPoint crossing(const Grid& g, std::uint64_t seed, double jitter, int i, int j) {
    Rng rng = Rng::from_key(seed, kTagCrossing, std::uint64_t(i), std::uint64_t(j));
    double amp = jitter * g.block / 2.0;
    MercatorPoint p;
    p.x = g.minx + double(i) * g.block + rng.uniform(-amp, amp);
    p.y = g.miny + double(j) * g.block + rng.uniform(-amp, amp);
    // Keep boundary crossings strictly inside the grid so no feature ever
    // leaves the scene bounds (2mm guard absorbs the mm quantization).
    const double guard = 0.002;
    p.x = std::clamp(p.x, g.minx + guard, g.minx + double(g.nx) * g.block - guard);
    p.y = std::clamp(p.y, g.miny + guard, g.miny + double(g.ny) * g.block - guard);
    return quantize_mm(p);
}

FeatureClass road_class(int line_index) {
    if (line_index % 4 == 0) return FeatureClass::RoadPrimary;
    if (line_index % 2 == 0) return FeatureClass::RoadSecondary;
    return FeatureClass::RoadResidential;
}

std::vector<MercatorPoint> rect_ring(double x0, double y0, double x1, double y1) {
    return {quantize_mm({x0, y0}), quantize_mm({x1, y0}), quantize_mm({x1, y1}),
            quantize_mm({x0, y1})};
}

void lot_counts(double inner_w, double inner_h, int& lots_x, int& lots_y) {
    lots_x = std::max(1, int(std::floor(inner_w / kLotTargetM + 0.5)));
    lots_y = std::max(1, int(std::floor(inner_h / kLotTargetM + 0.5)));
}

} // namespace

double quantize_mm(double v) { return std::round(v * 1000.0) / 1000.0; }

MercatorPoint quantize_mm(MercatorPoint p) { return {quantize_mm(p.x), quantize_mm(p.y)}; }

std::int64_t building_capacity(const GeoBounds& bounds, const CityParams& params) {
    Grid g = make_grid(bounds, params);
    double margin = kBlockMarginFrac * g.block;
    double inner = g.block - 2.0 * margin;
    int lx, ly;
    lot_counts(inner, inner, lx, ly);
    return std::int64_t(g.nx) * g.ny * lx * ly;
}

VectorScene generate_city(std::uint64_t seed, const GeoBounds& bounds, const CityParams& params) {
    if (!(bounds.width() > 0) || !(bounds.height() > 0))
        throw std::invalid_argument("generate_city: degenerate bounds");
    if (params.block_size_m <= 0)
        throw std::invalid_argument("generate_city: block size must be positive");
    if (params.road_jitter < 0 || params.road_jitter > 0.45)
        throw std::invalid_argument("generate_city: road_jitter outside [0, 0.45]");
    auto check_prob = [](double v, const char* name) {
        if (v < 0 || v > 1)
            throw std::invalid_argument(std::string("generate_city: ") + name + " outside [0, 1]");
    };
    check_prob(params.building_density, "building_density");
    check_prob(params.park_probability, "park_probability");
    check_prob(params.water_probability, "water_probability");
    check_prob(params.poi_density, "poi_density");

    Grid g = make_grid(bounds, params);
    if (g.nx < 1 || g.ny < 1)
        throw std::invalid_argument("generate_city: bounds smaller than one block");

    VectorScene scene;
    scene.bounds = bounds;
    scene.seed = seed;
    std::int64_t next_id = 0;
    std::vector<std::pair<MercatorPoint, MercatorPoint>> building_boxes; // centroid source

    double margin = kBlockMarginFrac * g.block;
    double shrink = 1.0 - 2.0 * kBlockMarginFrac;

    // Blocks: water / grass quads or building lot grids.
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            std::uint64_t block_index = std::uint64_t(j) * std::uint64_t(g.nx) + std::uint64_t(i);
            Rng brng = Rng::from_key(seed, kTagBlock, block_index);
            double fate = brng.next_double();
            if (fate < params.water_probability || fate < params.water_probability + params.park_probability) {
                bool is_water = fate < params.water_probability;
                // Inset the jittered corner quad toward its centroid.
                MercatorPoint c00 = crossing(g, seed, params.road_jitter, i, j);
                MercatorPoint c10 = crossing(g, seed, params.road_jitter, i + 1, j);
                MercatorPoint c11 = crossing(g, seed, params.road_jitter, i + 1, j + 1);
                MercatorPoint c01 = crossing(g, seed, params.road_jitter, i, j + 1);
                MercatorPoint ctr{(c00.x + c10.x + c11.x + c01.x) / 4.0,
                                  (c00.y + c10.y + c11.y + c01.y) / 4.0};
                auto inset = [&](MercatorPoint p) {
                    return quantize_mm(MercatorPoint{ctr.x + (p.x - ctr.x) * shrink,
                                                     ctr.y + (p.y - ctr.y) * shrink});
                };
                VectorFeature f;
                f.id = next_id++;
                f.cls = is_water ? FeatureClass::Water : FeatureClass::Grass;
                f.geom = Geometry::polygon({inset(c00), inset(c10), inset(c11), inset(c01)});
                scene.features.push_back(std::move(f));
                continue;
            }

            // Building lots on the unjittered inner rectangle.
            double bx0 = g.minx + double(i) * g.block + margin;
            double by0 = g.miny + double(j) * g.block + margin;
            double inner = g.block - 2.0 * margin;
            int lx, ly;
            lot_counts(inner, inner, lx, ly);
            double lot_w = inner / lx;
            double lot_h = inner / ly;
            for (int v = 0; v < ly; ++v) {
                for (int u = 0; u < lx; ++u) {
                    std::uint64_t lot_index = std::uint64_t(v) * std::uint64_t(lx) + std::uint64_t(u);
                    Rng lrng = Rng::from_key(seed, kTagLot, block_index, lot_index);
                    if (!(lrng.next_double() < params.building_density)) continue;
                    double gap = kBuildingGapFrac * std::min(lot_w, lot_h);
                    double w = lot_w - 2.0 * gap;
                    double h = lot_h - 2.0 * gap;
                    // Mild deterministic size/offset variation.
                    double sx = lrng.uniform(0.85, 1.0);
                    double sy = lrng.uniform(0.85, 1.0);
                    double bw = w * sx, bh = h * sy;
                    double ox = lrng.uniform(0.0, w - bw);
                    double oy = lrng.uniform(0.0, h - bh);
                    double x0 = bx0 + u * lot_w + gap + ox;
                    double y0 = by0 + v * lot_h + gap + oy;
                    VectorFeature f;
                    f.id = next_id++;
                    f.cls = FeatureClass::Building;
                    f.geom = Geometry::polygon(rect_ring(x0, y0, x0 + bw, y0 + bh));
                    building_boxes.push_back({f.geom.pts[0], f.geom.pts[2]});
                    scene.features.push_back(std::move(f));
                }
            }
        }
    }

    // Street network along the jittered grid lines.
    for (int i = 0; i <= g.nx; ++i) {
        std::vector<MercatorPoint> pts;
        pts.reserve(g.ny + 1);
        for (int j = 0; j <= g.ny; ++j) pts.push_back(crossing(g, seed, params.road_jitter, i, j));
        VectorFeature f;
        f.id = next_id++;
        f.cls = road_class(i);
        f.geom = Geometry::polyline(std::move(pts));
        scene.features.push_back(std::move(f));
    }
    for (int j = 0; j <= g.ny; ++j) {
        std::vector<MercatorPoint> pts;
        pts.reserve(g.nx + 1);
        for (int i = 0; i <= g.nx; ++i) pts.push_back(crossing(g, seed, params.road_jitter, i, j));
        VectorFeature f;
        f.id = next_id++;
        f.cls = road_class(j);
        f.geom = Geometry::polyline(std::move(pts));
        scene.features.push_back(std::move(f));
    }

    // POIs near building centroids.
    for (std::size_t b = 0; b < building_boxes.size(); ++b) {
        Rng prng = Rng::from_key(seed, kTagPoi, b);
        if (!(prng.next_double() < params.poi_density)) continue;
        auto [lo, hi] = building_boxes[b];
        double cx = (lo.x + hi.x) / 2.0, cy = (lo.y + hi.y) / 2.0;
        double jx = prng.uniform(-0.25, 0.25) * (hi.x - lo.x);
        double jy = prng.uniform(-0.25, 0.25) * (hi.y - lo.y);
        VectorFeature f;
        f.id = next_id++;
        f.cls = FeatureClass::Poi;
        f.geom = Geometry::point(quantize_mm({cx + jx, cy + jy}));
        scene.features.push_back(std::move(f));
    }

    // Jittered vertices on boundary lines can poke past the bounds.
    VectorScene clipped = clip_scene_to(scene, bounds);
    clipped.seed = seed;
    clipped.bounds = bounds;
    return clipped;
}

} // namespace cartogan
