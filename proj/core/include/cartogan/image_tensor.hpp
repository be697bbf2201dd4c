#ifndef CARTOGAN_IMAGE_TENSOR_HPP
#define CARTOGAN_IMAGE_TENSOR_HPP

#include <cmath>

#include "cartogan/raster.hpp"
#include "cartogan/tensor.hpp"

namespace cartogan {

// RGB8 -> (1,3,h,w) float in [-1,1], channel-planar.
inline ag::Tensor<float> tile_to_tensor(const RasterTile& img) {
    ag::Shape s{1, 3, img.height, img.width};
    std::vector<float> data(s.numel());
    const std::size_t plane = std::size_t(img.height) * img.width;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* p = img.at(x, y);
            std::size_t i = std::size_t(y) * img.width + x;
            data[i] = float(p[0]) / 127.5f - 1.0f;
            data[plane + i] = float(p[1]) / 127.5f - 1.0f;
            data[2 * plane + i] = float(p[2]) / 127.5f - 1.0f;
        }
    return ag::Tensor<float>::from_data(s, std::move(data));
}

// Denormalization: round((v+1)*127.5) half-up, clamped to [0,255].
inline std::uint8_t denormalize_channel(float v) {
    float x = std::floor((v + 1.0f) * 127.5f + 0.5f);
    if (x < 0.0f) x = 0.0f;
    if (x > 255.0f) x = 255.0f;
    return std::uint8_t(x);
}

inline RasterTile tensor_to_tile(const ag::Tensor<float>& t) {
    const ag::Shape& s = t.shape();
    if (s.n != 1 || s.c != 3)
        throw std::invalid_argument("tensor_to_tile: expected (1,3,h,w), got " + s.str());
    RasterTile img;
    img.width = s.w;
    img.height = s.h;
    img.pixels.resize(std::size_t(s.w) * s.h * 3);
    const std::size_t plane = std::size_t(s.h) * s.w;
    const auto& d = t.data();
    for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x) {
            std::size_t i = std::size_t(y) * s.w + x;
            std::uint8_t* p = img.at(x, y);
            p[0] = denormalize_channel(d[i]);
            p[1] = denormalize_channel(d[plane + i]);
            p[2] = denormalize_channel(d[2 * plane + i]);
        }
    return img;
}

} // namespace cartogan

#endif
