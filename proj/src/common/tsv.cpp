#include "stereotax/tsv.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"

namespace stereotax {

std::size_t TsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return static_cast<std::size_t>(-1);
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

TsvTable parse_tsv(std::string_view text) {
  TsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  // Strip a UTF-8 byte-order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") start = 3;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    auto cells = split(line, '\t');
    if (!have_header) {
      for (auto& c : cells) c = std::string(trim(c));
      table.header = std::move(cells);
      have_header = true;
    } else {
      table.rows.push_back({line_no, std::move(cells)});
    }
    if (end == text.size()) break;
  }
  return table;
}

TsvTable read_tsv(const std::filesystem::path& path) { return parse_tsv(read_file(path)); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void schema_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::kSchema, path.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    schema_error(path, line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    schema_error(path, line, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace stereotax
