#ifndef CARTOGAN_TILE_GEOMETRY_HPP
#define CARTOGAN_TILE_GEOMETRY_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cartogan {

inline constexpr double kEarthRadiusM = 6378137.0;
inline constexpr double kWorldHalfM = 20037508.342789244; // pi * R
inline constexpr double kMaxLatitudeDeg = 85.05113;       // Mercator square limit
inline constexpr int kMaxZoom = 20;

struct GeoPoint {
    double lat = 0.0; // degrees, |lat| <= kMaxLatitudeDeg
    double lon = 0.0; // degrees in [-180, 180)
};

struct MercatorPoint {
    double x = 0.0; // meters, |x| <= kWorldHalfM (+eps)
    double y = 0.0;
};

struct PixelPoint {
    double x = 0.0;
    double y = 0.0; // grows downward
};

struct GeoBounds {
    MercatorPoint min;
    MercatorPoint max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    bool contains(const MercatorPoint& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    bool intersects(const GeoBounds& o) const {
        return min.x <= o.max.x && o.min.x <= max.x &&
               min.y <= o.max.y && o.min.y <= max.y;
    }
    GeoBounds expanded(double margin) const {
        return {{min.x - margin, min.y - margin}, {max.x + margin, max.y + margin}};
    }
};

struct TileCoord {
    int z = 0;
    std::int32_t x = 0;
    std::int32_t y = 0;

    auto operator<=>(const TileCoord&) const = default;
    bool valid() const {
        if (z < 0 || z > kMaxZoom) return false;
        std::int64_t n = std::int64_t(1) << z;
        return x >= 0 && x < n && y >= 0 && y < n;
    }
    std::string str() const; // "z/x/y"
    static std::optional<TileCoord> parse(std::string_view s);
};

// Normalizes lon into [-180, 180). Latitude is left untouched.
GeoPoint normalized(GeoPoint p);

// Spherical-Mercator forward projection. Throws std::domain_error when the
// latitude is outside the +-kMaxLatitudeDeg clamp range or lon outside
// [-180, 180]. The result y is clamped into [-kWorldHalfM, kWorldHalfM]
// (the published clamp latitude is a hair beyond the exact square limit).
MercatorPoint geo_to_mercator(const GeoPoint& p);

// Inverse projection; throws std::domain_error outside the world extent.
GeoPoint mercator_to_geo(const MercatorPoint& p);

// Slippy-scheme tile lookup, indices clamped into [0, 2^z).
TileCoord geo_to_tile(const GeoPoint& p, int zoom);

// Mercator-space extent of a tile. Children tile the parent exactly and
// adjacent tiles share edge coordinates bit-for-bit.
GeoBounds tile_bounds(const TileCoord& t);

// Order: (2x,2y), (2x+1,2y), (2x,2y+1), (2x+1,2y+1).
std::array<TileCoord, 4> tile_children(const TileCoord& t);
TileCoord tile_parent(const TileCoord& t);

// Linear map of the bounds onto [0, tile_size)^2, y growing downward.
PixelPoint mercator_to_pixel(const MercatorPoint& p, const GeoBounds& b, int tile_size);

// Fractional pixel position of p inside tile t. Throws std::domain_error
// if p falls outside the tile (NW-inclusive edge rule).
PixelPoint geo_to_pixel(const GeoPoint& p, const TileCoord& t, int tile_size);

} // namespace cartogan

#endif
