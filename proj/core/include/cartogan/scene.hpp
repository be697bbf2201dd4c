#ifndef CARTOGAN_SCENE_HPP
#define CARTOGAN_SCENE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cartogan/tile_geometry.hpp"

namespace cartogan {

enum class FeatureClass : std::uint8_t {
    RoadPrimary,
    RoadSecondary,
    RoadResidential,
    Building,
    Water,
    Grass,
    Poi,
};

inline constexpr int kFeatureClassCount = 7;

const char* class_token(FeatureClass c);
std::optional<FeatureClass> class_from_token(std::string_view tok);

enum class GeometryKind : std::uint8_t { Point, Polyline, Polygon };

const char* kind_token(GeometryKind k);
std::optional<GeometryKind> kind_from_token(std::string_view tok);

// Tagged geometry. Points carry 1 vertex, polylines >= 2, polygon rings >= 3
// (implicitly closed, counter-clockwise in the Mercator frame).
struct Geometry {
    GeometryKind kind = GeometryKind::Point;
    std::vector<MercatorPoint> pts;

    static Geometry point(MercatorPoint p);
    static Geometry polyline(std::vector<MercatorPoint> pts); // throws on <2 vertices
    static Geometry polygon(std::vector<MercatorPoint> ring); // throws on <3 vertices

    bool operator==(const Geometry& o) const;
};

bool class_matches_geometry(FeatureClass c, GeometryKind k);

struct VectorFeature {
    std::int64_t id = 0;
    FeatureClass cls = FeatureClass::Poi;
    Geometry geom;

    bool operator==(const VectorFeature& o) const;
};

struct VectorScene {
    GeoBounds bounds;
    std::uint64_t seed = 0;
    std::vector<VectorFeature> features;

    bool operator==(const VectorScene& o) const;
};

struct CityParams {
    double block_size_m = 180.0;
    double road_jitter = 0.12;      // fraction of block size, [0, 0.45]
    double building_density = 0.55; // [0, 1]
    double park_probability = 0.08; // [0, 1]
    double water_probability = 0.05;
    double poi_density = 0.35; // per-building marker probability, [0, 1]
};

// All scene coordinates are quantized to millimeters so the 3-decimal text
// format round-trips exactly.
double quantize_mm(double v);
MercatorPoint quantize_mm(MercatorPoint p);

// Deterministic jittered-grid city: primary roads every 4th grid line,
// secondary every other, residential for the rest; blocks carry building
// lots, parks or water; POIs sit near building centroids. Pure function of
// (seed, bounds, params).
VectorScene generate_city(std::uint64_t seed, const GeoBounds& bounds, const CityParams& params);

// Independent count of the building lots generate_city carves out of the
// grid at density 1 with park/water probability 0. Used by tests as the
// subdivision oracle; kept next to the generator so the lot-grid constants
// stay in one translation unit.
std::int64_t building_capacity(const GeoBounds& bounds, const CityParams& params);

// Sutherland-Hodgman polygon clip against an axis-aligned box. Degenerate
// output (<3 distinct vertices) comes back empty.
std::vector<MercatorPoint> clip_polygon_box(const std::vector<MercatorPoint>& ring,
                                            const GeoBounds& box);

// Liang-Barsky polyline clip; one run per contiguous clipped stretch.
std::vector<std::vector<MercatorPoint>> clip_polyline_box(const std::vector<MercatorPoint>& pts,
                                                          const GeoBounds& box);

// Features intersecting the box survive, clipped; polyline features that
// re-enter the box become several runs sharing the original id.
VectorScene clip_scene_to(const VectorScene& scene, const GeoBounds& box);
VectorScene clip_scene(const VectorScene& scene, const TileCoord& t, double margin_m);

// Line-oriented text format, one feature per line; see serialize_scene for
// the exact layout. parse_scene reports malformed input as
// "line <n>: <reason>".
std::string serialize_scene(const VectorScene& scene);
VectorScene parse_scene(std::string_view text);

class SceneParseError : public std::runtime_error {
public:
    SceneParseError(int line, const std::string& reason);
    int line() const { return line_; }

private:
    int line_;
};

} // namespace cartogan

#endif
