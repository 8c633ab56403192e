#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace stereotax {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's raw bytes. Throws Error(kIo) if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// Digest of an ordered list of digests (e.g. several dictionary files).
std::string combine_digests(std::span<const std::string> digests);

std::string read_file(const std::filesystem::path& path);

}  // namespace stereotax
