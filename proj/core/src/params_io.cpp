#include "cartogan/params_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cartogan::ag {

static_assert(std::endian::native == std::endian::little,
              "blob i/o assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'C', 'G', 'T', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                 char((v >> 24) & 0xff)};
    out.write(b, 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("blob: truncated integer");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

} // namespace

void save_blob(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_blob: cannot open " + path.string());
    out.write(kMagic, 4);
    for (const auto& [name, t] : tensors) {
        write_u32(out, std::uint32_t(name.size()));
        out.write(name.data(), std::streamsize(name.size()));
        const Shape& s = t.shape();
        write_u32(out, 4);
        for (int d : {s.n, s.c, s.h, s.w}) write_u32(out, std::uint32_t(d));
        out.write(reinterpret_cast<const char*>(t.data().data()),
                  std::streamsize(t.data().size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("save_blob: write failed for " + path.string());
}

std::vector<NamedTensor> load_blob(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_blob: cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_blob: bad magic in " + path.string());
    std::vector<NamedTensor> out;
    while (true) {
        in.peek();
        if (in.eof()) break;
        std::uint32_t name_len = read_u32(in);
        if (name_len > 4096) throw std::runtime_error("load_blob: unreasonable name length");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        std::uint32_t rank = read_u32(in);
        if (rank != 4) throw std::runtime_error("load_blob: only rank-4 tensors supported");
        std::uint32_t dims[4];
        for (auto& d : dims) d = read_u32(in);
        Shape s{int(dims[0]), int(dims[1]), int(dims[2]), int(dims[3])};
        std::vector<float> data(s.numel());
        in.read(reinterpret_cast<char*>(data.data()),
                std::streamsize(data.size() * sizeof(float)));
        if (!in) throw std::runtime_error("load_blob: truncated payload for '" + name + "'");
        out.emplace_back(std::move(name), Tensor<float>::from_data(s, std::move(data)));
    }
    return out;
}

} // namespace cartogan::ag
