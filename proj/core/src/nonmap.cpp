#include "cartogan/nonmap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cartogan/rng.hpp"

namespace cartogan {

namespace {

std::uint8_t to_byte(double v) {
    return std::uint8_t(std::clamp(v, 0.0, 255.0));
}

// Bilinear value noise on a coarse random lattice.
std::vector<double> value_noise(Rng& rng, int size, int cells) {
    int g = cells + 1;
    std::vector<double> lattice(std::size_t(g) * g);
    for (auto& v : lattice) v = rng.next_double();
    std::vector<double> out(std::size_t(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double fx = double(x) / size * cells;
            double fy = double(y) / size * cells;
            int ix = int(fx), iy = int(fy);
            double tx = fx - ix, ty = fy - iy;
            double a = lattice[std::size_t(iy) * g + ix];
            double b = lattice[std::size_t(iy) * g + ix + 1];
            double c = lattice[std::size_t(iy + 1) * g + ix];
            double d = lattice[std::size_t(iy + 1) * g + ix + 1];
            out[std::size_t(y) * size + x] =
                a * (1 - tx) * (1 - ty) + b * tx * (1 - ty) + c * (1 - tx) * ty + d * tx * ty;
        }
    return out;
}

RasterTile clouds(Rng& rng, int size) {
    auto n1 = value_noise(rng, size, 4);
    auto n2 = value_noise(rng, size, 8);
    auto n3 = value_noise(rng, size, 16);
    double base[3], tint[3];
    for (int c = 0; c < 3; ++c) base[c] = rng.uniform(20, 200);
    for (int c = 0; c < 3; ++c) tint[c] = rng.uniform(40, 235);
    RasterTile img = RasterTile::filled(size, size, {0, 0, 0, 255});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            std::size_t i = std::size_t(y) * size + x;
            double v = 0.55 * n1[i] + 0.3 * n2[i] + 0.15 * n3[i];
            std::uint8_t* p = img.at(x, y);
            for (int c = 0; c < 3; ++c) p[c] = to_byte(base[c] + (tint[c] - base[c]) * v);
        }
    return img;
}

RasterTile gradient(Rng& rng, int size) {
    double angle = rng.uniform(0, 6.283185307179586);
    double dx = std::cos(angle), dy = std::sin(angle);
    double c0[3], c1[3];
    for (int c = 0; c < 3; ++c) c0[c] = rng.uniform(0, 255);
    for (int c = 0; c < 3; ++c) c1[c] = rng.uniform(0, 255);
    auto noise = value_noise(rng, size, 8);
    double noise_amp = rng.uniform(8, 40);
    RasterTile img = RasterTile::filled(size, size, {0, 0, 0, 255});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double t = ((x * dx + y * dy) / double(size) + 1.0) / 2.0;
            t = std::clamp(t, 0.0, 1.0);
            double n = (noise[std::size_t(y) * size + x] - 0.5) * noise_amp;
            std::uint8_t* p = img.at(x, y);
            for (int c = 0; c < 3; ++c) p[c] = to_byte(c0[c] + (c1[c] - c0[c]) * t + n);
        }
    return img;
}

RasterTile blobs(Rng& rng, int size) {
    double bg[3];
    for (int c = 0; c < 3; ++c) bg[c] = rng.uniform(10, 120);
    RasterTile img = RasterTile::filled(
        size, size, {to_byte(bg[0]), to_byte(bg[1]), to_byte(bg[2]), 255});
    int count = 6 + int(rng.next_below(8));
    std::vector<double> acc(std::size_t(size) * size * 3);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < 3; ++c) acc[(std::size_t(y) * size + x) * 3 + c] = bg[c];
    for (int b = 0; b < count; ++b) {
        double cx = rng.uniform(0, size), cy = rng.uniform(0, size);
        double r = rng.uniform(size / 10.0, size / 2.5);
        double col[3];
        for (int c = 0; c < 3; ++c) col[c] = rng.uniform(30, 250);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                double d = std::hypot(x - cx, y - cy) / r;
                if (d >= 1.0) continue;
                double w = (1.0 - d) * (1.0 - d); // soft falloff
                for (int c = 0; c < 3; ++c) {
                    double& v = acc[(std::size_t(y) * size + x) * 3 + c];
                    v = v * (1 - w) + col[c] * w;
                }
            }
    }
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            std::uint8_t* p = img.at(x, y);
            for (int c = 0; c < 3; ++c) p[c] = to_byte(acc[(std::size_t(y) * size + x) * 3 + c]);
        }
    return img;
}

} // namespace

RasterTile nonmap_texture(std::uint64_t seed, int size) {
    Rng rng = Rng::from_key(seed, 0x7E47);
    switch (rng.next_below(3)) {
        case 0: return clouds(rng, size);
        case 1: return gradient(rng, size);
        default: return blobs(rng, size);
    }
}

} // namespace cartogan
