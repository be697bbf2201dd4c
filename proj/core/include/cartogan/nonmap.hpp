#ifndef CARTOGAN_NONMAP_HPP
#define CARTOGAN_NONMAP_HPP

#include <cstdint>

#include "cartogan/raster.hpp"

namespace cartogan {

// Procedural non-map texture (value-noise clouds, gradients or soft blobs),
// the negative class for the classifier. Deterministic in (seed, size).
RasterTile nonmap_texture(std::uint64_t seed, int size);

} // namespace cartogan

#endif
