#pragma once

#include <filesystem>
#include <string_view>

namespace stereotax {

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace stereotax
