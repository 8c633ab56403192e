#include <algorithm>
#include <set>
#include <unordered_set>

#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/harness.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::harness {

std::vector<std::string> StimulusSet::terms_of(std::string_view category) const {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    if (t.category == category) out.push_back(t.term);
  }
  return out;
}

std::vector<std::string> load_category_list(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!seen.emplace(t).second) schema_error(path, line_no, "duplicate category '" + std::string(t) + "'");
    out.emplace_back(t);
  }
  if (out.empty()) throw Error(ErrorKind::kSchema, "category list '" + path.string() + "' is empty");
  return out;
}

StimulusSet load_stimuli(const std::filesystem::path& path,
                         std::optional<std::span<const std::string>> declared_categories) {
  const auto table = read_tsv(path);
  const auto c_term = table.column("term");
  const auto c_cat = table.column("category");
  if (table.header.empty()) throw Error(ErrorKind::kSchema, "stimuli file '" + path.string() + "' is empty");
  if (c_term == static_cast<std::size_t>(-1) || c_cat == static_cast<std::size_t>(-1)) {
    schema_error(path, 1, "stimuli header must contain 'term' and 'category'");
  }
  std::set<std::string> declared;
  if (declared_categories) declared.insert(declared_categories->begin(), declared_categories->end());

  StimulusSet set;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& row : table.rows) {
    if (row.cells.size() != table.header.size()) {
      schema_error(path, row.line, "expected " + std::to_string(table.header.size()) + " columns");
    }
    StimulusTerm t{std::string(trim(row.cells[c_term])), std::string(trim(row.cells[c_cat]))};
    if (t.term.empty()) schema_error(path, row.line, "empty term");
    if (t.category.empty()) schema_error(path, row.line, "unknown category '' for term '" + t.term + "'");
    if (declared_categories && !declared.contains(t.category)) {
      schema_error(path, row.line, "unknown category '" + t.category + "' for term '" + t.term + "'");
    }
    if (!seen.emplace(t.category, t.term).second) {
      schema_error(path, row.line, "duplicate term '" + t.term + "' in category '" + t.category + "'");
    }
    if (std::find(set.categories.begin(), set.categories.end(), t.category) == set.categories.end()) {
      set.categories.push_back(t.category);
    }
    set.terms.push_back(std::move(t));
  }
  if (set.terms.empty()) throw Error(ErrorKind::kSchema, "stimuli file '" + path.string() + "' has no terms");
  return set;
}

}  // namespace stereotax::harness
