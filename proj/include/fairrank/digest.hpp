#pragma once

#include <string>

namespace fairrank {

std::string sha256_hex(const std::string& data);

std::string base64_encode(const std::string& data);

/// Throws std::invalid_argument on malformed input.
std::string base64_decode(const std::string& data);

}  // namespace fairrank
