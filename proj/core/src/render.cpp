#include "cartogan/render.hpp"

#include <algorithm>
#include <cmath>

namespace cartogan {

namespace {

// Paints pixels whose centers fall inside [x0,x1) on row y.
void fill_span(RasterTile& img, double x0, double x1, int y, Rgba color,
               std::vector<std::uint8_t>* mask) {
    if (y < 0 || y >= img.height) return;
    int xs = std::max(0, int(std::ceil(x0 - 0.5)));
    int xe = std::min(img.width - 1, int(std::ceil(x1 - 0.5)) - 1);
    for (int x = xs; x <= xe; ++x) {
        if (mask)
            (*mask)[std::size_t(y) * img.width + x] = 1;
        else
            img.composite(x, y, color);
    }
}

void fill_polygon_impl(RasterTile& img, std::span<const PixelPoint> ring, Rgba color,
                       std::vector<std::uint8_t>* mask) {
    if (ring.size() < 3) return;
    double ymin = ring[0].y, ymax = ring[0].y;
    for (const auto& p : ring) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    int ys = std::max(0, int(std::floor(ymin - 0.5)));
    int ye = std::min(img.height - 1, int(std::ceil(ymax)));
    std::vector<double> xs;
    for (int y = ys; y <= ye; ++y) {
        double yc = y + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const PixelPoint& a = ring[i];
            const PixelPoint& b = ring[(i + 1) % ring.size()];
            if ((a.y <= yc) == (b.y <= yc)) continue;
            xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
            fill_span(img, xs[k], xs[k + 1], y, color, mask);
    }
}

double dist_sq_to_segment(double px, double py, const PixelPoint& a, const PixelPoint& b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    double len_sq = dx * dx + dy * dy;
    double t = 0.0;
    if (len_sq > 0.0) t = std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len_sq, 0.0, 1.0);
    double qx = a.x + t * dx - px, qy = a.y + t * dy - py;
    return qx * qx + qy * qy;
}

void mark_segment(std::vector<std::uint8_t>& mask, const RasterTile& img, const PixelPoint& a,
                  const PixelPoint& b, double half_width) {
    double r = half_width;
    int x0 = std::max(0, int(std::floor(std::min(a.x, b.x) - r - 1)));
    int x1 = std::min(img.width - 1, int(std::ceil(std::max(a.x, b.x) + r + 1)));
    int y0 = std::max(0, int(std::floor(std::min(a.y, b.y) - r - 1)));
    int y1 = std::min(img.height - 1, int(std::ceil(std::max(a.y, b.y) + r + 1)));
    double r_sq = r * r;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (dist_sq_to_segment(x + 0.5, y + 0.5, a, b) <= r_sq)
                mask[std::size_t(y) * img.width + x] = 1;
}

void composite_mask(RasterTile& img, const std::vector<std::uint8_t>& mask, Rgba color) {
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (mask[std::size_t(y) * img.width + x]) img.composite(x, y, color);
}

void mark_triangle(std::vector<std::uint8_t>& mask, const RasterTile& img, PixelPoint a,
                   PixelPoint b, PixelPoint c) {
    auto cross = [](const PixelPoint& o, const PixelPoint& p, const PixelPoint& q) {
        return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    };
    int x0 = std::max(0, int(std::floor(std::min({a.x, b.x, c.x}))));
    int x1 = std::min(img.width - 1, int(std::ceil(std::max({a.x, b.x, c.x}))));
    int y0 = std::max(0, int(std::floor(std::min({a.y, b.y, c.y}))));
    int y1 = std::min(img.height - 1, int(std::ceil(std::max({a.y, b.y, c.y}))));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            PixelPoint p{x + 0.5, y + 0.5};
            double d0 = cross(a, b, p), d1 = cross(b, c, p), d2 = cross(c, a, p);
            bool neg = d0 < 0 || d1 < 0 || d2 < 0;
            bool pos = d0 > 0 || d1 > 0 || d2 > 0;
            if (!(neg && pos)) mask[std::size_t(y) * img.width + x] = 1;
        }
}

} // namespace

void fill_polygon(RasterTile& img, std::span<const PixelPoint> ring, Rgba color) {
    fill_polygon_impl(img, ring, color, nullptr);
}

void draw_polyline(RasterTile& img, std::span<const PixelPoint> pts, double width_px, Rgba color) {
    if (pts.size() < 2 || width_px <= 0.0 || color.a == 0) return;
    std::vector<std::uint8_t> mask(std::size_t(img.width) * img.height, 0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        mark_segment(mask, img, pts[i], pts[i + 1], width_px / 2.0);
    composite_mask(img, mask, color);
}

void draw_marker(RasterTile& img, PixelPoint p, const MarkerStyle& marker) {
    std::vector<std::uint8_t> mask(std::size_t(img.width) * img.height, 0);
    double r = marker.radius_px;
    if (marker.shape == MarkerStyle::Shape::Circle) {
        mark_segment(mask, img, p, p, r);
    } else {
        // Pin: disc head above the anchor plus a tail triangle down to it.
        PixelPoint head{p.x, p.y - 1.4 * r};
        mark_segment(mask, img, head, head, r);
        mark_triangle(mask, img, {p.x - 0.66 * r, p.y - 1.1 * r}, {p.x + 0.66 * r, p.y - 1.1 * r},
                      p);
    }
    composite_mask(img, mask, marker.color);
}

std::vector<PixelPoint> typify_pois(std::span<const PoiPoint> pois, double radius_px,
                                    int min_size) {
    std::vector<PoiPoint> sorted(pois.begin(), pois.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const PoiPoint& a, const PoiPoint& b) { return a.id < b.id; });
    std::vector<bool> assigned(sorted.size(), false);
    std::vector<PixelPoint> out;
    double r_sq = radius_px * radius_px;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (assigned[i]) continue;
        std::vector<std::size_t> members{i};
        assigned[i] = true;
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            if (assigned[j]) continue;
            double dx = sorted[j].p.x - sorted[i].p.x;
            double dy = sorted[j].p.y - sorted[i].p.y;
            if (dx * dx + dy * dy <= r_sq) {
                assigned[j] = true;
                members.push_back(j);
            }
        }
        if (int(members.size()) >= min_size) {
            PixelPoint c{0, 0};
            for (auto m : members) {
                c.x += sorted[m].p.x;
                c.y += sorted[m].p.y;
            }
            c.x /= double(members.size());
            c.y /= double(members.size());
            out.push_back(c);
        } else {
            for (auto m : members) out.push_back(sorted[m].p);
        }
    }
    return out;
}

namespace {

double max_marker_reach(const MarkerStyle& m) {
    return m.shape == MarkerStyle::Shape::Circle ? m.radius_px : 2.4 * m.radius_px;
}

} // namespace

double render_clip_margin_m(const TileCoord& t, const StyleSheet& sheet, int size_px) {
    double reach_px = 1.0;
    for (const auto& [cls, st] : sheet.styles) {
        (void)cls;
        double w = 0.0;
        for (const auto& [z, v] : st.stroke_width) {
            (void)z;
            w = std::max(w, v);
        }
        reach_px = std::max(reach_px, w / 2.0 + st.casing_width);
        if (st.marker) reach_px = std::max(reach_px, max_marker_reach(*st.marker));
    }
    if (sheet.typify.enabled)
        reach_px += 2.0 * sheet.typify.cluster_radius_px;
    double meters_per_px = tile_bounds(t).width() / double(size_px);
    return (reach_px + 2.0) * meters_per_px;
}

RasterTile render_tile(const VectorScene& scene, const TileCoord& t, const StyleSheet& sheet,
                       int size_px) {
    if (!is_valid_tile_size(size_px))
        throw std::invalid_argument("render_tile: tile size must be 64, 128 or 256");
    sheet.validate();
    GeoBounds b = tile_bounds(t);
    RasterTile img = RasterTile::filled(size_px, size_px, sheet.background);

    auto project = [&](const MercatorPoint& m) { return mercator_to_pixel(m, b, size_px); };
    auto project_all = [&](const std::vector<MercatorPoint>& pts) {
        std::vector<PixelPoint> out;
        out.reserve(pts.size());
        for (const auto& m : pts) out.push_back(project(m));
        return out;
    };

    for (FeatureClass cls : sheet.draw_order) {
        auto sit = sheet.styles.find(cls);
        if (sit == sheet.styles.end()) continue;
        const ClassStyle& st = sit->second;
        if (t.z < st.min_zoom) continue;

        if (cls == FeatureClass::Poi) {
            std::vector<PoiPoint> pois;
            for (const auto& f : scene.features)
                if (f.cls == cls) pois.push_back({f.id, project(f.geom.pts[0])});
            if (!st.marker || pois.empty()) continue;
            std::vector<PixelPoint> markers;
            if (sheet.typify.enabled)
                markers = typify_pois(pois, sheet.typify.cluster_radius_px,
                                      sheet.typify.min_cluster_size);
            else
                for (const auto& p : pois) markers.push_back(p.p);
            for (const auto& m : markers) draw_marker(img, m, *st.marker);
            continue;
        }

        double width = st.width_at(t.z);
        bool is_line = cls == FeatureClass::RoadPrimary || cls == FeatureClass::RoadSecondary ||
                       cls == FeatureClass::RoadResidential;
        if (is_line && st.casing_width > 0 && st.fill.a > 0) {
            // Casing pass under every stroke of this class.
            for (const auto& f : scene.features) {
                if (f.cls != cls || f.geom.kind != GeometryKind::Polyline) continue;
                auto pts = project_all(f.geom.pts);
                draw_polyline(img, pts, width + 2.0 * st.casing_width, st.fill);
            }
        }
        for (const auto& f : scene.features) {
            if (f.cls != cls) continue;
            if (f.geom.kind == GeometryKind::Polygon) {
                auto pts = project_all(f.geom.pts);
                if (st.fill.a > 0) fill_polygon(img, pts, st.fill);
                if (st.stroke.a > 0 && width > 0) {
                    auto closed = pts;
                    closed.push_back(pts.front());
                    draw_polyline(img, closed, width, st.stroke);
                }
            } else if (f.geom.kind == GeometryKind::Polyline) {
                auto pts = project_all(f.geom.pts);
                if (st.stroke.a > 0 && width > 0) draw_polyline(img, pts, width, st.stroke);
            }
        }
    }
    return img;
}

} // namespace cartogan
