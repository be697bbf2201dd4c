#include "cartogan/scene.hpp"

#include <cmath>

namespace cartogan {

namespace {

GeoBounds feature_bbox(const Geometry& g) {
    GeoBounds b{{g.pts[0].x, g.pts[0].y}, {g.pts[0].x, g.pts[0].y}};
    for (const auto& p : g.pts) {
        b.min.x = std::min(b.min.x, p.x);
        b.min.y = std::min(b.min.y, p.y);
        b.max.x = std::max(b.max.x, p.x);
        b.max.y = std::max(b.max.y, p.y);
    }
    return b;
}

// Half-plane clip step of Sutherland-Hodgman. side: 0=left,1=right,2=bottom,3=top.
std::vector<MercatorPoint> clip_half_plane(const std::vector<MercatorPoint>& in, int side,
                                           const GeoBounds& box) {
    auto inside = [&](const MercatorPoint& p) {
        switch (side) {
            case 0: return p.x >= box.min.x;
            case 1: return p.x <= box.max.x;
            case 2: return p.y >= box.min.y;
            default: return p.y <= box.max.y;
        }
    };
    auto intersect = [&](const MercatorPoint& a, const MercatorPoint& b) {
        double t;
        MercatorPoint r;
        if (side == 0 || side == 1) {
            double edge = side == 0 ? box.min.x : box.max.x;
            t = (edge - a.x) / (b.x - a.x);
            r = {edge, a.y + t * (b.y - a.y)};
        } else {
            double edge = side == 2 ? box.min.y : box.max.y;
            t = (edge - a.y) / (b.y - a.y);
            r = {a.x + t * (b.x - a.x), edge};
        }
        return r;
    };
    std::vector<MercatorPoint> out;
    out.reserve(in.size() + 4);
    for (std::size_t i = 0; i < in.size(); ++i) {
        const MercatorPoint& prev = in[(i + in.size() - 1) % in.size()];
        const MercatorPoint& cur = in[i];
        bool pin = inside(prev), cin = inside(cur);
        if (cin) {
            if (!pin) out.push_back(intersect(prev, cur));
            out.push_back(cur);
        } else if (pin) {
            out.push_back(intersect(prev, cur));
        }
    }
    return out;
}

bool nearly_same(const MercatorPoint& a, const MercatorPoint& b) {
    return a.x == b.x && a.y == b.y;
}

} // namespace

std::vector<MercatorPoint> clip_polygon_box(const std::vector<MercatorPoint>& ring,
                                            const GeoBounds& box) {
    std::vector<MercatorPoint> out = ring;
    for (int side = 0; side < 4 && !out.empty(); ++side)
        out = clip_half_plane(out, side, box);
    for (auto& p : out) p = quantize_mm(p);
    // Quantization can merge clip vertices; drop consecutive duplicates
    // (cyclically) and reject degenerate results.
    std::vector<MercatorPoint> dedup;
    for (const auto& p : out)
        if (dedup.empty() || !nearly_same(dedup.back(), p)) dedup.push_back(p);
    while (dedup.size() > 1 && nearly_same(dedup.front(), dedup.back())) dedup.pop_back();
    if (dedup.size() < 3) return {};
    return dedup;
}

std::vector<std::vector<MercatorPoint>> clip_polyline_box(const std::vector<MercatorPoint>& pts,
                                                          const GeoBounds& box) {
    std::vector<std::vector<MercatorPoint>> runs;
    std::vector<MercatorPoint> run;
    auto flush = [&] {
        std::vector<MercatorPoint> dedup;
        for (const auto& p : run)
            if (dedup.empty() || !nearly_same(dedup.back(), p)) dedup.push_back(p);
        if (dedup.size() >= 2) runs.push_back(std::move(dedup));
        run.clear();
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        // Liang-Barsky on segment [a, b].
        MercatorPoint a = pts[i], b = pts[i + 1];
        double dx = b.x - a.x, dy = b.y - a.y;
        double t0 = 0.0, t1 = 1.0;
        bool reject = false;
        double p[4] = {-dx, dx, -dy, dy};
        double q[4] = {a.x - box.min.x, box.max.x - a.x, a.y - box.min.y, box.max.y - a.y};
        for (int k = 0; k < 4; ++k) {
            if (p[k] == 0.0) {
                if (q[k] < 0.0) {
                    reject = true;
                    break;
                }
            } else {
                double t = q[k] / p[k];
                if (p[k] < 0.0) {
                    if (t > t1) { reject = true; break; }
                    if (t > t0) t0 = t;
                } else {
                    if (t < t0) { reject = true; break; }
                    if (t < t1) t1 = t;
                }
            }
        }
        if (reject) {
            flush();
            continue;
        }
        MercatorPoint ca = t0 == 0.0 ? a : quantize_mm(MercatorPoint{a.x + t0 * dx, a.y + t0 * dy});
        MercatorPoint cb = t1 == 1.0 ? b : quantize_mm(MercatorPoint{a.x + t1 * dx, a.y + t1 * dy});
        if (run.empty()) {
            run.push_back(ca);
        } else if (!nearly_same(run.back(), ca)) {
            flush();
            run.push_back(ca);
        }
        run.push_back(cb);
        if (t1 < 1.0) flush(); // exited the box
    }
    flush();
    return runs;
}

VectorScene clip_scene_to(const VectorScene& scene, const GeoBounds& box) {
    VectorScene out;
    out.bounds = box;
    out.seed = scene.seed;
    for (const auto& f : scene.features) {
        if (!feature_bbox(f.geom).intersects(box)) continue;
        switch (f.geom.kind) {
            case GeometryKind::Point:
                if (box.contains(f.geom.pts[0])) out.features.push_back(f);
                break;
            case GeometryKind::Polyline: {
                for (auto& r : clip_polyline_box(f.geom.pts, box)) {
                    VectorFeature nf;
                    nf.id = f.id;
                    nf.cls = f.cls;
                    nf.geom = Geometry::polyline(std::move(r));
                    out.features.push_back(std::move(nf));
                }
                break;
            }
            case GeometryKind::Polygon: {
                auto ring = clip_polygon_box(f.geom.pts, box);
                if (!ring.empty()) {
                    VectorFeature nf;
                    nf.id = f.id;
                    nf.cls = f.cls;
                    nf.geom = Geometry::polygon(std::move(ring));
                    out.features.push_back(std::move(nf));
                }
                break;
            }
        }
    }
    return out;
}

VectorScene clip_scene(const VectorScene& scene, const TileCoord& t, double margin_m) {
    return clip_scene_to(scene, tile_bounds(t).expanded(margin_m));
}

} // namespace cartogan
