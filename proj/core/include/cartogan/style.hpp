#ifndef CARTOGAN_STYLE_HPP
#define CARTOGAN_STYLE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cartogan/raster.hpp"
#include "cartogan/scene.hpp"

namespace cartogan {

struct MarkerStyle {
    enum class Shape { Circle, Pin };
    Shape shape = Shape::Circle;
    double radius_px = 2.0;
    Rgba color{255, 0, 255, 255};
};

struct ClassStyle {
    Rgba fill{};   // polygons: fill color; lines: casing color
    Rgba stroke{}; // polygons: outline; lines: the line itself
    std::map<int, double> stroke_width; // zoom -> px, step table
    int min_zoom = 0;                   // class dropped below this zoom
    double casing_width = 0.0;          // extra px each side, lines only
    std::optional<MarkerStyle> marker;  // point classes

    // Width of the greatest table key <= z; 0 when the table is empty or
    // z is below the first key.
    double width_at(int z) const;
};

struct TypifyParams {
    bool enabled = false;
    double cluster_radius_px = 10.0;
    int min_cluster_size = 3;
};

struct StyleSheet {
    std::string id;
    Rgba background{255, 255, 255, 255};
    std::map<FeatureClass, ClassStyle> styles;
    std::vector<FeatureClass> draw_order; // every class exactly once
    TypifyParams typify;

    void validate() const; // throws std::invalid_argument
};

// Saturated distinct hues, subtle transparency, no zoom-dependent rules.
StyleSheet builtin_simple_sheet();

// The learnable multiscale style: pale background, white cased roads whose
// width grows with rank and zoom, buildings only from zoom 16, clustered
// POI markers, muted water/grass.
StyleSheet builtin_target_sheet();

// nullptr when the id names no built-in.
const StyleSheet* find_builtin_sheet(const std::string& id);

} // namespace cartogan

#endif
