#include "stereotax/error.hpp"
#include "stereotax/report.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::report {

BaselineFixture load_baseline(const std::filesystem::path& path, const lexicon::DimensionRegistry& registry) {
  const auto table = read_tsv(path);
  if (table.header.size() < 3 || table.header[0] != "table" || table.header[1] != "dimension") {
    schema_error(path, 1, "baseline header must be 'table dimension <column>...'");
  }
  BaselineFixture f;
  f.columns.assign(table.header.begin() + 2, table.header.end());
  for (const auto& row : table.rows) {
    if (row.cells.size() != table.header.size()) schema_error(path, row.line, "wrong column count");
    stats::Metric metric;
    if (row.cells[0] == "prevalence") {
      metric = stats::Metric::kPrevalence;
    } else if (row.cells[0] == "direction") {
      metric = stats::Metric::kDirection;
    } else if (row.cells[0] == "valence") {
      metric = stats::Metric::kValence;
    } else {
      schema_error(path, row.line, "unknown table '" + row.cells[0] + "'");
    }
    const auto dim = registry.resolve(row.cells[1]);
    if (!dim) schema_error(path, row.line, "unknown dimension '" + row.cells[1] + "'");
    for (std::size_t c = 0; c < f.columns.size(); ++c) {
      const auto& cell = row.cells[c + 2];
      if (cell.empty()) continue;
      auto& column = f.tables[metric][f.columns[c]];
      if (column.count(*dim)) schema_error(path, row.line, "duplicate dimension '" + row.cells[1] + "'");
      column[*dim] = parse_double(cell, path, row.line);
    }
  }
  return f;
}

std::map<std::string, double> load_category_ratings(const std::filesystem::path& path) {
  const auto table = read_tsv(path);
  const auto cat = table.column("category");
  const auto rating = table.column("rating");
  if (cat == static_cast<std::size_t>(-1) || rating == static_cast<std::size_t>(-1)) {
    schema_error(path, 1, "ratings header must contain 'category' and 'rating'");
  }
  std::map<std::string, double> out;
  for (const auto& row : table.rows) {
    if (row.cells.size() != table.header.size()) schema_error(path, row.line, "wrong column count");
    if (out.count(row.cells[cat])) schema_error(path, row.line, "duplicate category '" + row.cells[cat] + "'");
    out[row.cells[cat]] = parse_double(row.cells[rating], path, row.line);
  }
  return out;
}

double column_correlation(const BaselineColumn& a, const BaselineColumn& b) {
  std::vector<double> x, y;
  for (const auto& [dim, v] : a) {
    if (const auto it = b.find(dim); it != b.end()) {
      x.push_back(v);
      y.push_back(it->second);
    }
  }
  return stats::pearson(x, y);
}

}  // namespace stereotax::report
