#ifndef CARTOGAN_PARAMS_IO_HPP
#define CARTOGAN_PARAMS_IO_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cartogan/tensor.hpp"

namespace cartogan::ag {

using NamedTensor = std::pair<std::string, Tensor<float>>;

// Versioned binary parameter blob, all integers 32-bit little-endian:
//   magic "CGT1"
//   per tensor: u32 name length, name bytes, u32 rank, rank u32 dims,
//               raw f32 little-endian payload
// Round-trips bit-exactly.
void save_blob(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_blob(const std::filesystem::path& path);

} // namespace cartogan::ag

#endif
