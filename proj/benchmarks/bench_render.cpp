#include <benchmark/benchmark.h>

#include "cartogan/render.hpp"

using namespace cartogan;

static void RenderTile(benchmark::State& state) {
    int zoom = int(state.range(0));
    GeoBounds bounds{{-3000, -3000}, {3000, 3000}};
    VectorScene scene = generate_city(7, bounds, CityParams{});
    TileCoord t = geo_to_tile(mercator_to_geo({10, 10}), zoom);
    const StyleSheet& sheet = *find_builtin_sheet("target-v1");
    double margin = render_clip_margin_m(t, sheet, 64);
    VectorScene clipped = clip_scene(scene, t, margin);
    for (auto _ : state) {
        RasterTile img = render_tile(clipped, t, sheet, 64);
        benchmark::DoNotOptimize(img.pixels.data());
    }
}
BENCHMARK(RenderTile)->Arg(15)->Arg(18);

static void CityGen(benchmark::State& state) {
    double half = double(state.range(0)) * 500.0;
    GeoBounds bounds{{-half, -half}, {half, half}};
    for (auto _ : state) {
        VectorScene scene = generate_city(11, bounds, CityParams{});
        benchmark::DoNotOptimize(scene.features.size());
    }
}
BENCHMARK(CityGen)->Arg(2)->Arg(8);

BENCHMARK_MAIN();
