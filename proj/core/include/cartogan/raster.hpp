#ifndef CARTOGAN_RASTER_HPP
#define CARTOGAN_RASTER_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cartogan {

struct Rgba {
    std::uint8_t r = 0, g = 0, b = 0, a = 255;
    bool operator==(const Rgba&) const = default;
};

// Fixed-size RGB8 image, row-major, 3 bytes per pixel.
struct RasterTile {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    static RasterTile filled(int w, int h, Rgba color);

    std::uint8_t* at(int x, int y) { return pixels.data() + 3 * (std::size_t(y) * width + x); }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + 3 * (std::size_t(y) * width + x);
    }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    // Alpha-over with 8-bit round-half-up quantization. Skips out-of-bounds
    // pixels and fully transparent colors.
    void composite(int x, int y, Rgba c);

    bool operator==(const RasterTile&) const = default;
};

// Supported training/evaluation tile edge lengths.
bool is_valid_tile_size(int size);

// Round-half-up alpha-over on one channel; exposed for the compositing tests.
std::uint8_t composite_channel(std::uint8_t src, std::uint8_t dst, std::uint8_t alpha);

void write_ppm(const std::filesystem::path& path, const RasterTile& img);
RasterTile read_ppm(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RasterTile& img);
RasterTile read_png(const std::filesystem::path& path);

// Dispatch on extension (.ppm / .png).
void write_image(const std::filesystem::path& path, const RasterTile& img);
RasterTile read_image(const std::filesystem::path& path);

} // namespace cartogan

#endif
