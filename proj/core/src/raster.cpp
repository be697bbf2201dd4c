#include "cartogan/raster.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace cartogan {

RasterTile RasterTile::filled(int w, int h, Rgba color) {
    RasterTile t;
    t.width = w;
    t.height = h;
    t.pixels.resize(std::size_t(w) * h * 3);
    for (std::size_t i = 0; i < t.pixels.size(); i += 3) {
        t.pixels[i] = color.r;
        t.pixels[i + 1] = color.g;
        t.pixels[i + 2] = color.b;
    }
    return t;
}

std::uint8_t composite_channel(std::uint8_t src, std::uint8_t dst, std::uint8_t alpha) {
    // floor((src*a + dst*(255-a))/255 + 0.5) in exact integer arithmetic
    unsigned num = unsigned(src) * alpha + unsigned(dst) * (255u - alpha);
    return std::uint8_t((2u * num + 255u) / 510u);
}

void RasterTile::composite(int x, int y, Rgba c) {
    if (c.a == 0 || !in_bounds(x, y)) return;
    std::uint8_t* p = at(x, y);
    if (c.a == 255) {
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
        return;
    }
    p[0] = composite_channel(c.r, p[0], c.a);
    p[1] = composite_channel(c.g, p[1], c.a);
    p[2] = composite_channel(c.b, p[2], c.a);
}

bool is_valid_tile_size(int size) { return size == 64 || size == 128 || size == 256; }

void write_ppm(const std::filesystem::path& path, const RasterTile& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_ppm: cannot open " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              std::streamsize(img.pixels.size()));
    if (!out) throw std::runtime_error("write_ppm: write failed for " + path.string());
}

namespace {

// Reads one whitespace-delimited PPM header token, skipping '#' comments.
std::string ppm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
        } else if (!std::isspace(ch)) {
            tok.push_back(char(ch));
            while ((ch = in.peek()) != EOF && !std::isspace(ch)) tok.push_back(char(in.get()));
            return tok;
        }
    }
    return tok;
}

} // namespace

RasterTile read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_ppm: cannot open " + path.string());
    if (ppm_token(in) != "P6") throw std::runtime_error("read_ppm: not a P6 file: " + path.string());
    RasterTile img;
    try {
        img.width = std::stoi(ppm_token(in));
        img.height = std::stoi(ppm_token(in));
        int maxval = std::stoi(ppm_token(in));
        if (maxval != 255) throw std::runtime_error("maxval != 255");
    } catch (const std::exception& e) {
        throw std::runtime_error("read_ppm: bad header in " + path.string() + ": " + e.what());
    }
    if (img.width <= 0 || img.height <= 0)
        throw std::runtime_error("read_ppm: bad dimensions in " + path.string());
    in.get(); // single whitespace byte after maxval
    img.pixels.resize(std::size_t(img.width) * img.height * 3);
    in.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
    if (in.gcount() != std::streamsize(img.pixels.size()))
        throw std::runtime_error("read_ppm: truncated pixel data in " + path.string());
    return img;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

void write_png(const std::filesystem::path& path, const RasterTile& img) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("write_png: cannot open " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: libpng error writing " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.at(0, y)));
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

RasterTile read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw std::runtime_error("read_png: cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: libpng error reading " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    RasterTile img;
    img.width = int(png_get_image_width(png, info));
    img.height = int(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != std::size_t(img.width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: unexpected row size in " + path.string());
    }
    img.pixels.resize(std::size_t(img.width) * img.height * 3);
    for (int y = 0; y < img.height; ++y)
        png_read_row(png, img.at(0, y), nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_image(const std::filesystem::path& path, const RasterTile& img) {
    auto ext = path.extension().string();
    if (ext == ".ppm") write_ppm(path, img);
    else if (ext == ".png") write_png(path, img);
    else throw std::runtime_error("write_image: unsupported extension " + ext);
}

RasterTile read_image(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    if (ext == ".ppm") return read_ppm(path);
    if (ext == ".png") return read_png(path);
    throw std::runtime_error("read_image: unsupported extension " + ext);
}

} // namespace cartogan
