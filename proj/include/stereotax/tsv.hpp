#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stereotax {

/// One parsed row of a tab-delimited file with its 1-based source line.
struct TsvRow {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

struct TsvTable {
  std::vector<std::string> header;
  std::vector<TsvRow> rows;

  /// Column index by header name, or npos.
  std::size_t column(std::string_view name) const;
};

/// Reads a UTF-8, tab-delimited file with a header row. Blank lines and
/// lines starting with '#' are skipped; CRLF endings are accepted.
TsvTable read_tsv(const std::filesystem::path& path);
TsvTable parse_tsv(std::string_view text);

std::vector<std::string> split(std::string_view s, char delim);
std::string_view trim(std::string_view s);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Throws Error(kSchema) naming file and line.
[[noreturn]] void schema_error(const std::filesystem::path& path, std::size_t line, const std::string& what);

double parse_double(std::string_view s, const std::filesystem::path& path, std::size_t line);
long long parse_int(std::string_view s, const std::filesystem::path& path, std::size_t line);

}  // namespace stereotax
