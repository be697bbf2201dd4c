#ifndef CARTOGAN_HASH_HPP
#define CARTOGAN_HASH_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace cartogan {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

} // namespace cartogan

#endif
