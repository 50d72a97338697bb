#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace hoal {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::string_view data);
std::string to_hex(const Sha256Digest &digest);
std::string sha256_hex(std::string_view data);
// Throws std::runtime_error if the file cannot be read.
std::string sha256_file_hex(const std::string &path);

}  // namespace hoal
