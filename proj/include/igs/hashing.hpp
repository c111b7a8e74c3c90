#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace igs {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace igs
