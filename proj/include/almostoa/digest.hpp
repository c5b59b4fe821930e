#pragma once

#include <string>
#include <string_view>

namespace almostoa {

/// Lower-case hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// "sha256:<hex>", the form stored in DocumentPart::content_digest.
inline std::string content_digest(std::string_view bytes) { return "sha256:" + sha256_hex(bytes); }

}  // namespace almostoa
