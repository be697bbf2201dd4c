#include "cartogan/scene.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace cartogan {

const char* class_token(FeatureClass c) {
    switch (c) {
        case FeatureClass::RoadPrimary: return "ROAD_PRIMARY";
        case FeatureClass::RoadSecondary: return "ROAD_SECONDARY";
        case FeatureClass::RoadResidential: return "ROAD_RESIDENTIAL";
        case FeatureClass::Building: return "BUILDING";
        case FeatureClass::Water: return "WATER";
        case FeatureClass::Grass: return "GRASS";
        case FeatureClass::Poi: return "POI";
    }
    return "?";
}

std::optional<FeatureClass> class_from_token(std::string_view tok) {
    for (int i = 0; i < kFeatureClassCount; ++i) {
        auto c = FeatureClass(i);
        if (tok == class_token(c)) return c;
    }
    return std::nullopt;
}

const char* kind_token(GeometryKind k) {
    switch (k) {
        case GeometryKind::Point: return "point";
        case GeometryKind::Polyline: return "line";
        case GeometryKind::Polygon: return "polygon";
    }
    return "?";
}

std::optional<GeometryKind> kind_from_token(std::string_view tok) {
    if (tok == "point") return GeometryKind::Point;
    if (tok == "line") return GeometryKind::Polyline;
    if (tok == "polygon") return GeometryKind::Polygon;
    return std::nullopt;
}

Geometry Geometry::point(MercatorPoint p) {
    Geometry g;
    g.kind = GeometryKind::Point;
    g.pts = {p};
    return g;
}

Geometry Geometry::polyline(std::vector<MercatorPoint> pts) {
    if (pts.size() < 2) throw std::invalid_argument("polyline needs >= 2 vertices");
    Geometry g;
    g.kind = GeometryKind::Polyline;
    g.pts = std::move(pts);
    return g;
}

Geometry Geometry::polygon(std::vector<MercatorPoint> ring) {
    if (ring.size() < 3) throw std::invalid_argument("polygon needs >= 3 vertices");
    Geometry g;
    g.kind = GeometryKind::Polygon;
    g.pts = std::move(ring);
    return g;
}

bool Geometry::operator==(const Geometry& o) const {
    if (kind != o.kind || pts.size() != o.pts.size()) return false;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].x != o.pts[i].x || pts[i].y != o.pts[i].y) return false;
    return true;
}

bool class_matches_geometry(FeatureClass c, GeometryKind k) {
    switch (c) {
        case FeatureClass::Poi: return k == GeometryKind::Point;
        case FeatureClass::RoadPrimary:
        case FeatureClass::RoadSecondary:
        case FeatureClass::RoadResidential: return k == GeometryKind::Polyline;
        case FeatureClass::Building:
        case FeatureClass::Water:
        case FeatureClass::Grass: return k == GeometryKind::Polygon;
    }
    return false;
}

bool VectorFeature::operator==(const VectorFeature& o) const {
    return id == o.id && cls == o.cls && geom == o.geom;
}

bool VectorScene::operator==(const VectorScene& o) const {
    return seed == o.seed && bounds.min.x == o.bounds.min.x && bounds.min.y == o.bounds.min.y &&
           bounds.max.x == o.bounds.max.x && bounds.max.y == o.bounds.max.y &&
           features == o.features;
}

SceneParseError::SceneParseError(int line, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}

namespace {

void append_coord(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    out += buf;
}

} // namespace

std::string serialize_scene(const VectorScene& scene) {
    std::string out;
    out.reserve(64 + scene.features.size() * 96);
    out += "scene v1 ";
    out += std::to_string(scene.seed);
    for (double v : {scene.bounds.min.x, scene.bounds.min.y, scene.bounds.max.x, scene.bounds.max.y}) {
        out += ' ';
        append_coord(out, v);
    }
    out += '\n';
    for (const auto& f : scene.features) {
        out += std::to_string(f.id);
        out += ' ';
        out += class_token(f.cls);
        out += ' ';
        out += kind_token(f.geom.kind);
        out += ' ';
        out += std::to_string(f.geom.pts.size());
        for (const auto& p : f.geom.pts) {
            out += ' ';
            append_coord(out, p.x);
            out += ' ';
            append_coord(out, p.y);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

double parse_coord(std::string_view tok, int line_no) {
    std::string s(tok);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size())
        throw SceneParseError(line_no, "bad coordinate '" + s + "'");
    return v;
}

std::int64_t parse_int(std::string_view tok, int line_no, const char* what) {
    std::string s(tok);
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw SceneParseError(line_no, std::string("bad ") + what + " '" + s + "'");
    return v;
}

} // namespace

VectorScene parse_scene(std::string_view text) {
    VectorScene scene;
    bool have_header = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (!have_header) {
            if (toks.size() != 7 || toks[0] != "scene" || toks[1] != "v1")
                throw SceneParseError(line_no, "expected header 'scene v1 <seed> <minx> <miny> <maxx> <maxy>'");
            errno = 0;
            std::string seed_s(toks[2]);
            char* end = nullptr;
            scene.seed = std::strtoull(seed_s.c_str(), &end, 10);
            if (errno != 0 || end != seed_s.c_str() + seed_s.size())
                throw SceneParseError(line_no, "bad seed '" + seed_s + "'");
            scene.bounds.min.x = parse_coord(toks[3], line_no);
            scene.bounds.min.y = parse_coord(toks[4], line_no);
            scene.bounds.max.x = parse_coord(toks[5], line_no);
            scene.bounds.max.y = parse_coord(toks[6], line_no);
            have_header = true;
            continue;
        }
        if (toks.size() < 4) throw SceneParseError(line_no, "feature line needs id, class, kind, count");
        VectorFeature f;
        f.id = parse_int(toks[0], line_no, "feature id");
        if (f.id < 0) throw SceneParseError(line_no, "feature id must be non-negative");
        auto cls = class_from_token(toks[1]);
        if (!cls) throw SceneParseError(line_no, "unknown class '" + std::string(toks[1]) + "'");
        f.cls = *cls;
        auto kind = kind_from_token(toks[2]);
        if (!kind) throw SceneParseError(line_no, "unknown geometry kind '" + std::string(toks[2]) + "'");
        std::int64_t n = parse_int(toks[3], line_no, "vertex count");
        std::int64_t min_n = *kind == GeometryKind::Point ? 1 : *kind == GeometryKind::Polyline ? 2 : 3;
        if (n < min_n)
            throw SceneParseError(line_no, std::string("vertex count below minimum for ") +
                                               kind_token(*kind));
        if (*kind == GeometryKind::Point && n != 1)
            throw SceneParseError(line_no, "point must have exactly 1 vertex");
        if (std::int64_t(toks.size()) != 4 + 2 * n)
            throw SceneParseError(line_no, "expected " + std::to_string(2 * n) +
                                               " coordinates, got " + std::to_string(toks.size() - 4));
        if (!class_matches_geometry(f.cls, *kind))
            throw SceneParseError(line_no, std::string("class ") + class_token(f.cls) +
                                               " cannot carry " + kind_token(*kind) + " geometry");
        f.geom.kind = *kind;
        f.geom.pts.reserve(std::size_t(n));
        for (std::int64_t i = 0; i < n; ++i) {
            MercatorPoint p;
            p.x = parse_coord(toks[4 + 2 * i], line_no);
            p.y = parse_coord(toks[5 + 2 * i], line_no);
            f.geom.pts.push_back(p);
        }
        scene.features.push_back(std::move(f));
    }
    if (!have_header) throw SceneParseError(line_no, "missing scene header");
    return scene;
}

} // namespace cartogan
