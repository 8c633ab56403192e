#include <sstream>

#include "stereotax/error.hpp"
#include "stereotax/report.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::report {
namespace {

constexpr const char* kFixed[] = {"response_id", "category", "term", "order", "normalized", "no_match"};

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void check_cell(std::string_view text) {
  if (text.find_first_of("\t\r\n") != std::string_view::npos) {
    throw Error(ErrorKind::kSchema, "codings field contains a tab or newline: '" + std::string(text) + "'");
  }
}

}  // namespace

std::string codings_to_tsv(std::span<const stats::CodedResponse> codings, const lexicon::DimensionRegistry& registry,
                           const std::string& provenance) {
  std::ostringstream out;
  out << provenance << '\n';
  for (std::size_t i = 0; i < std::size(kFixed); ++i) out << (i ? "\t" : "") << kFixed[i];
  for (std::size_t d = 0; d < registry.size(); ++d) {
    const auto& n = registry.name(d);
    out << "\tp:" << n << "\td:" << n << "\tv:" << n;
  }
  out << '\n';
  for (const auto& r : codings) {
    for (const auto* cell : {&r.category, &r.term, &r.normalized}) check_cell(*cell);
    out << r.coding.response_id << '\t' << r.category << '\t' << r.term << '\t' << r.order << '\t' << r.normalized
        << '\t' << (r.coding.no_match ? 1 : 0);
    for (std::size_t d = 0; d < registry.size(); ++d) {
      out << '\t' << static_cast<int>(r.coding.presence[d]) << '\t' << opt(r.coding.direction[d]) << '\t'
          << opt(r.coding.valence[d]);
    }
    out << '\n';
  }
  return out.str();
}

std::vector<stats::CodedResponse> codings_from_tsv(const std::filesystem::path& path,
                                                   const lexicon::DimensionRegistry& registry) {
  const auto table = read_tsv(path);
  const std::size_t width = std::size(kFixed) + 3 * registry.size();
  if (table.header.size() != width) {
    schema_error(path, 1, "expected " + std::to_string(width) + " columns, found " + std::to_string(table.header.size()));
  }
  for (std::size_t i = 0; i < std::size(kFixed); ++i) {
    if (table.header[i] != kFixed[i]) schema_error(path, 1, "expected column '" + std::string(kFixed[i]) + "'");
  }
  for (std::size_t d = 0; d < registry.size(); ++d) {
    if (table.header[std::size(kFixed) + 3 * d] != "p:" + registry.name(d)) {
      schema_error(path, 1, "dimension columns do not match the registry at '" + registry.name(d) + "'");
    }
  }
  std::vector<stats::CodedResponse> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.cells.size() != width) schema_error(path, row.line, "wrong column count");
    stats::CodedResponse r;
    r.coding.response_id = static_cast<std::size_t>(parse_int(row.cells[0], path, row.line));
    r.category = row.cells[1];
    r.term = row.cells[2];
    r.order = static_cast<int>(parse_int(row.cells[3], path, row.line));
    r.normalized = row.cells[4];
    r.coding.no_match = parse_int(row.cells[5], path, row.line) != 0;
    r.coding.presence.assign(registry.size(), 0);
    r.coding.direction.assign(registry.size(), std::nullopt);
    r.coding.valence.assign(registry.size(), std::nullopt);
    bool any = false;
    for (std::size_t d = 0; d < registry.size(); ++d) {
      const std::size_t base = std::size(kFixed) + 3 * d;
      const auto p = parse_int(row.cells[base], path, row.line);
      if (p != 0 && p != 1) schema_error(path, row.line, "presence must be 0 or 1");
      r.coding.presence[d] = static_cast<std::uint8_t>(p);
      any = any || p == 1;
      if (!row.cells[base + 1].empty()) r.coding.direction[d] = parse_double(row.cells[base + 1], path, row.line);
      if (!row.cells[base + 2].empty()) r.coding.valence[d] = parse_double(row.cells[base + 2], path, row.line);
      if (!p && (r.coding.direction[d] || r.coding.valence[d])) {
        schema_error(path, row.line, "direction/valence given for an absent dimension");
      }
    }
    if (any == r.coding.no_match) schema_error(path, row.line, "no_match disagrees with presence columns");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace stereotax::report
