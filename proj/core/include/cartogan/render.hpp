#ifndef CARTOGAN_RENDER_HPP
#define CARTOGAN_RENDER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "cartogan/raster.hpp"
#include "cartogan/scene.hpp"
#include "cartogan/style.hpp"
#include "cartogan/tile_geometry.hpp"

namespace cartogan {

// Even-odd scanline fill sampled at pixel centers; no anti-aliasing.
void fill_polygon(RasterTile& img, std::span<const PixelPoint> ring, Rgba color);

// Paints every pixel whose center lies within width/2 of any segment.
// Coverage is resolved per polyline so overlapping segments composite once.
void draw_polyline(RasterTile& img, std::span<const PixelPoint> pts, double width_px, Rgba color);

void draw_marker(RasterTile& img, PixelPoint p, const MarkerStyle& marker);

struct PoiPoint {
    std::int64_t id = 0;
    PixelPoint p;
};

// Greedy lowest-id clustering: each unassigned POI in id order seeds a
// cluster of the unassigned POIs within radius; clusters of at least
// min_size collapse to their centroid, smaller ones pass through unchanged.
std::vector<PixelPoint> typify_pois(std::span<const PoiPoint> pois, double radius_px,
                                    int min_size);

// Rasterizes the scene over the tile extent: background, then classes in
// sheet order with zoom selection, zoom-dependent widths and POI typify.
// Pure function; bytes depend only on the arguments.
RasterTile render_tile(const VectorScene& scene, const TileCoord& t, const StyleSheet& sheet,
                       int size_px);

// Margin (in meters) wide enough that clip_scene + render_tile reproduces a
// full-scene render bit-for-bit: covers stroke reach, marker reach and the
// typify neighborhood at the given zoom/size.
double render_clip_margin_m(const TileCoord& t, const StyleSheet& sheet, int size_px);

} // namespace cartogan

#endif
