#include "cartogan/style.hpp"

#include <stdexcept>

namespace cartogan {

double ClassStyle::width_at(int z) const {
    auto it = stroke_width.upper_bound(z);
    if (it == stroke_width.begin()) return 0.0;
    return std::prev(it)->second;
}

void StyleSheet::validate() const {
    if (draw_order.size() != std::size_t(kFeatureClassCount))
        throw std::invalid_argument("stylesheet '" + id + "': draw order must list every class once");
    std::vector<bool> seen(kFeatureClassCount, false);
    for (auto c : draw_order) {
        if (seen[int(c)])
            throw std::invalid_argument("stylesheet '" + id + "': class repeated in draw order");
        seen[int(c)] = true;
    }
    for (const auto& [cls, st] : styles) {
        (void)cls;
        if (st.min_zoom < 0 || st.min_zoom > kMaxZoom)
            throw std::invalid_argument("stylesheet '" + id + "': min_zoom outside [0, 20]");
        if (st.casing_width < 0)
            throw std::invalid_argument("stylesheet '" + id + "': negative casing width");
        for (const auto& [z, w] : st.stroke_width) {
            (void)z;
            if (w < 0) throw std::invalid_argument("stylesheet '" + id + "': negative stroke width");
        }
    }
}

StyleSheet builtin_simple_sheet() {
    StyleSheet s;
    s.id = "simple-v1";
    s.background = {255, 255, 255, 255};
    s.typify.enabled = false;

    auto style = [](Rgba fill, Rgba stroke, double w) {
        ClassStyle c;
        c.fill = fill;
        c.stroke = stroke;
        c.stroke_width = {{0, w}};
        c.min_zoom = 0;
        return c;
    };
    const std::uint8_t a = 230; // subtle transparency everywhere

    s.styles[FeatureClass::Water] = style({60, 110, 235, a}, {35, 70, 190, a}, 1);
    s.styles[FeatureClass::Grass] = style({80, 205, 90, a}, {45, 150, 55, a}, 1);
    s.styles[FeatureClass::Building] = style({235, 75, 60, a}, {175, 45, 35, a}, 1);

    ClassStyle primary;
    primary.stroke = {250, 170, 30, a};
    primary.stroke_width = {{0, 1}};
    s.styles[FeatureClass::RoadPrimary] = primary;

    ClassStyle secondary;
    secondary.stroke = {200, 45, 205, a};
    secondary.stroke_width = {{0, 1}};
    s.styles[FeatureClass::RoadSecondary] = secondary;

    ClassStyle residential;
    residential.stroke = {95, 95, 95, a};
    residential.stroke_width = {{0, 1}};
    s.styles[FeatureClass::RoadResidential] = residential;

    ClassStyle poi;
    poi.marker = MarkerStyle{MarkerStyle::Shape::Circle, 2.0, {255, 0, 255, 255}};
    s.styles[FeatureClass::Poi] = poi;

    s.draw_order = {FeatureClass::Water,         FeatureClass::Grass,
                    FeatureClass::Building,      FeatureClass::RoadResidential,
                    FeatureClass::RoadSecondary, FeatureClass::RoadPrimary,
                    FeatureClass::Poi};
    s.validate();
    return s;
}

StyleSheet builtin_target_sheet() {
    StyleSheet s;
    s.id = "target-v1";
    s.background = {241, 240, 235, 255};
    s.typify = {true, 10.0, 3};

    ClassStyle water;
    water.fill = {168, 205, 250, 255};
    s.styles[FeatureClass::Water] = water;

    ClassStyle grass;
    grass.fill = {198, 229, 184, 255};
    s.styles[FeatureClass::Grass] = grass;

    ClassStyle building;
    building.fill = {216, 211, 203, 255};
    building.stroke = {190, 185, 177, 255};
    building.stroke_width = {{0, 1}};
    building.min_zoom = 16; // generalized away below zoom 16
    s.styles[FeatureClass::Building] = building;

    auto road = [](std::map<int, double> widths, double casing, int min_zoom) {
        ClassStyle c;
        c.stroke = {255, 255, 255, 255};
        c.fill = {186, 186, 186, 255}; // casing grey
        c.stroke_width = std::move(widths);
        c.casing_width = casing;
        c.min_zoom = min_zoom;
        return c;
    };
    s.styles[FeatureClass::RoadPrimary] = road({{0, 2}, {15, 3}, {17, 5}, {18, 6}}, 1.0, 0);
    s.styles[FeatureClass::RoadSecondary] = road({{0, 1.5}, {15, 2}, {17, 3.5}, {18, 4.5}}, 1.0, 0);
    s.styles[FeatureClass::RoadResidential] = road({{0, 1.5}, {17, 2.5}, {18, 3.5}}, 0.5, 16);

    ClassStyle poi;
    poi.marker = MarkerStyle{MarkerStyle::Shape::Pin, 3.0, {219, 88, 73, 255}};
    poi.min_zoom = 15;
    s.styles[FeatureClass::Poi] = poi;

    s.draw_order = {FeatureClass::Grass,         FeatureClass::Water,
                    FeatureClass::Building,      FeatureClass::RoadResidential,
                    FeatureClass::RoadSecondary, FeatureClass::RoadPrimary,
                    FeatureClass::Poi};
    s.validate();
    return s;
}

const StyleSheet* find_builtin_sheet(const std::string& id) {
    static const StyleSheet simple = builtin_simple_sheet();
    static const StyleSheet target = builtin_target_sheet();
    if (id == simple.id) return &simple;
    if (id == target.id) return &target;
    return nullptr;
}

} // namespace cartogan
