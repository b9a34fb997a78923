#pragma once

#include <string>
#include <string_view>

namespace das {

// Lowercase hex SHA-256 (64 chars).
std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);

// Whitespace is ignored. Throws Error(MalformedInput) on bad input.
std::string base64_decode(std::string_view text);

}  // namespace das
