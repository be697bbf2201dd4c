#include "cartogan/tile_geometry.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cartogan {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kExtentEps = 1e-6;
} // namespace

std::string TileCoord::str() const {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%d/%d/%d", z, x, y);
    return buf;
}

std::optional<TileCoord> TileCoord::parse(std::string_view s) {
    TileCoord t;
    int consumed = 0;
    char tail = 0;
    std::string tmp(s);
    int got = std::sscanf(tmp.c_str(), "%d/%d/%d%n%c", &t.z, &t.x, &t.y, &consumed, &tail);
    if (got != 3 || consumed != int(tmp.size())) return std::nullopt;
    if (!t.valid()) return std::nullopt;
    return t;
}

GeoPoint normalized(GeoPoint p) {
    double lon = std::fmod(p.lon + 180.0, 360.0);
    if (lon < 0) lon += 360.0;
    p.lon = lon - 180.0;
    return p;
}

MercatorPoint geo_to_mercator(const GeoPoint& p) {
    if (!(std::abs(p.lat) <= kMaxLatitudeDeg))
        throw std::domain_error("geo_to_mercator: latitude " + std::to_string(p.lat) +
                                " outside +-" + std::to_string(kMaxLatitudeDeg));
    if (!(p.lon >= -180.0 && p.lon <= 180.0))
        throw std::domain_error("geo_to_mercator: longitude " + std::to_string(p.lon) +
                                " outside [-180, 180]");
    MercatorPoint m;
    m.x = kEarthRadiusM * p.lon * kDegToRad;
    m.y = kEarthRadiusM * std::log(std::tan(kPi / 4.0 + p.lat * kDegToRad / 2.0));
    if (m.y > kWorldHalfM) m.y = kWorldHalfM;
    if (m.y < -kWorldHalfM) m.y = -kWorldHalfM;
    return m;
}

GeoPoint mercator_to_geo(const MercatorPoint& p) {
    if (std::abs(p.x) > kWorldHalfM + kExtentEps || std::abs(p.y) > kWorldHalfM + kExtentEps)
        throw std::domain_error("mercator_to_geo: point outside world extent");
    GeoPoint g;
    g.lon = p.x / kEarthRadiusM * kRadToDeg;
    g.lat = (2.0 * std::atan(std::exp(p.y / kEarthRadiusM)) - kPi / 2.0) * kRadToDeg;
    return g;
}

TileCoord geo_to_tile(const GeoPoint& p, int zoom) {
    if (zoom < 0 || zoom > kMaxZoom)
        throw std::domain_error("geo_to_tile: zoom outside [0, 20]");
    if (!(std::abs(p.lat) <= kMaxLatitudeDeg))
        throw std::domain_error("geo_to_tile: latitude outside clamp range");
    double n = double(std::int64_t(1) << zoom);
    double xt = std::floor((p.lon + 180.0) / 360.0 * n);
    double lat_rad = p.lat * kDegToRad;
    double yt = std::floor((1.0 - std::asinh(std::tan(lat_rad)) / kPi) / 2.0 * n);
    auto clamp_idx = [&](double v) {
        if (v < 0) v = 0;
        if (v > n - 1) v = n - 1;
        return std::int32_t(v);
    };
    return TileCoord{zoom, clamp_idx(xt), clamp_idx(yt)};
}

GeoBounds tile_bounds(const TileCoord& t) {
    if (!t.valid()) throw std::domain_error("tile_bounds: invalid tile " + t.str());
    // World width divided by a power of two is exact; min/max expressions
    // below make children partition the parent bit-for-bit.
    double ext = (2.0 * kWorldHalfM) / double(std::int64_t(1) << t.z);
    GeoBounds b;
    b.min.x = -kWorldHalfM + double(t.x) * ext;
    b.max.x = -kWorldHalfM + double(t.x + 1) * ext;
    b.max.y = kWorldHalfM - double(t.y) * ext;
    b.min.y = kWorldHalfM - double(t.y + 1) * ext;
    return b;
}

std::array<TileCoord, 4> tile_children(const TileCoord& t) {
    if (!t.valid()) throw std::domain_error("tile_children: invalid tile");
    if (t.z >= kMaxZoom) throw std::domain_error("tile_children: zoom 20 has no children");
    return {TileCoord{t.z + 1, 2 * t.x, 2 * t.y},
            TileCoord{t.z + 1, 2 * t.x + 1, 2 * t.y},
            TileCoord{t.z + 1, 2 * t.x, 2 * t.y + 1},
            TileCoord{t.z + 1, 2 * t.x + 1, 2 * t.y + 1}};
}

TileCoord tile_parent(const TileCoord& t) {
    if (!t.valid()) throw std::domain_error("tile_parent: invalid tile");
    if (t.z <= 0) throw std::domain_error("tile_parent: root tile has no parent");
    return TileCoord{t.z - 1, t.x / 2, t.y / 2};
}

PixelPoint mercator_to_pixel(const MercatorPoint& p, const GeoBounds& b, int tile_size) {
    PixelPoint px;
    px.x = (p.x - b.min.x) / b.width() * double(tile_size);
    px.y = (b.max.y - p.y) / b.height() * double(tile_size);
    return px;
}

PixelPoint geo_to_pixel(const GeoPoint& p, const TileCoord& t, int tile_size) {
    GeoBounds b = tile_bounds(t);
    MercatorPoint m = geo_to_mercator(p);
    // NW corner belongs to this tile, SE corner to the neighbors.
    if (!(m.x >= b.min.x && m.x < b.max.x && m.y > b.min.y && m.y <= b.max.y))
        throw std::domain_error("geo_to_pixel: point outside tile " + t.str());
    return mercator_to_pixel(m, b, tile_size);
}

} // namespace cartogan
