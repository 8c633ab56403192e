#include <cmath>
#include <set>
#include <utility>

#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/lexicon.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::lexicon {
namespace {

constexpr auto kNpos = static_cast<std::size_t>(-1);

struct RowOrigin {
  std::string file;
  std::size_t line = 0;
};

[[noreturn]] void entry_error(const RowOrigin& at, const std::string& what) {
  if (at.file.empty()) throw Error(ErrorKind::kSchema, "entry " + std::to_string(at.line) + ": " + what);
  schema_error(at.file, at.line, what);
}

void validate(const DictionaryEntry& e, const DimensionRegistry& registry, const RowOrigin& at) {
  if (e.surface.empty()) entry_error(at, "empty surface");
  if (normalize(e.surface) != e.surface) {
    entry_error(at, "surface '" + e.surface + "' is not in normalized form ('" + normalize(e.surface) + "')");
  }
  if (e.dimension >= registry.size()) entry_error(at, "dimension index out of range");
  if (e.direction) {
    if (*e.direction != -1 && *e.direction != 1) {
      entry_error(at, "direction must be -1 or +1, got " + std::to_string(*e.direction));
    }
    if (!registry.has_direction(e.dimension)) {
      entry_error(at, "direction given for non-directional dimension '" + registry.name(e.dimension) + "'");
    }
  } else if (registry.has_direction(e.dimension)) {
    entry_error(at, "direction required for directional dimension '" + registry.name(e.dimension) + "'");
  }
  if (!std::isfinite(e.valence) || e.valence < -1.0 || e.valence > 1.0) {
    entry_error(at, "valence must lie in [-1, 1], got " + format_double(e.valence));
  }
}

}  // namespace

Lexicon::Lexicon(std::vector<DictionaryEntry> entries, DimensionRegistry registry, std::string digest)
    : entries_(std::move(entries)), registry_(std::move(registry)), digest_(std::move(digest)) {
  std::set<std::pair<std::string, std::size_t>> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    validate(e, registry_, {{}, i + 1});
    if (!seen.emplace(e.surface, e.dimension).second) {
      entry_error({{}, i + 1}, "duplicate entry for ('" + e.surface + "', " + registry_.name(e.dimension) + ")");
    }
    index_[e.surface].push_back(i);
  }
  if (digest_.empty()) {
    std::string canon = registry_.digest() + '\n';
    for (const auto& e : entries_) {
      canon += e.surface + '\t' + std::to_string(e.dimension) + '\t' + e.subdimension + '\t' +
               (e.direction ? std::to_string(*e.direction) : std::string()) + '\t' + format_double(e.valence) + '\n';
    }
    digest_ = sha256_hex(canon);
  }
}

Lexicon Lexicon::load(std::span<const std::filesystem::path> paths, DimensionRegistry registry) {
  std::vector<DictionaryEntry> entries;
  std::vector<RowOrigin> origins;
  std::vector<std::string> digests{registry.digest()};
  std::set<std::pair<std::string, std::size_t>> seen;

  for (const auto& path : paths) {
    const std::string text = read_file(path);
    digests.push_back(sha256_hex(text));
    const auto table = parse_tsv(text);
    const auto c_surface = table.column("surface");
    const auto c_dim = table.column("dimension");
    const auto c_sub = table.column("subdimension");
    const auto c_dir = table.column("direction");
    const auto c_val = table.column("valence");
    if (c_surface == kNpos || c_dim == kNpos || c_dir == kNpos || c_val == kNpos) {
      schema_error(path, 1, "dictionary header must name surface, dimension, direction, valence (subdimension optional)");
    }
    for (const auto& row : table.rows) {
      if (row.cells.size() != table.header.size()) {
        schema_error(path, row.line, "expected " + std::to_string(table.header.size()) + " columns, got " +
                                         std::to_string(row.cells.size()));
      }
      DictionaryEntry e;
      e.surface = std::string(trim(row.cells[c_surface]));
      const std::string dim_id(trim(row.cells[c_dim]));
      e.subdimension = c_sub == kNpos ? std::string() : std::string(trim(row.cells[c_sub]));
      const auto dim = registry.resolve(dim_id);
      if (!dim) schema_error(path, row.line, "unknown dimension '" + dim_id + "'");
      e.dimension = *dim;
      if (!e.subdimension.empty()) {
        if (const auto sub = registry.resolve(e.subdimension); sub && *sub != e.dimension) {
          schema_error(path, row.line, "subdimension '" + e.subdimension + "' rolls up to " + registry.name(*sub) +
                                           ", not " + registry.name(e.dimension));
        }
      }
      // A subdimension named in the dimension column is kept as metadata.
      if (e.subdimension.empty() && registry.rollup().contains(dim_id)) e.subdimension = dim_id;
      const auto dir_cell = trim(row.cells[c_dir]);
      if (!dir_cell.empty()) e.direction = static_cast<int>(parse_int(dir_cell, path, row.line));
      e.valence = parse_double(row.cells[c_val], path, row.line);

      const RowOrigin at{path.string(), row.line};
      validate(e, registry, at);
      if (!seen.emplace(e.surface, e.dimension).second) {
        entry_error(at, "duplicate entry for ('" + e.surface + "', " + registry.name(e.dimension) + ")");
      }
      entries.push_back(std::move(e));
      origins.push_back(at);
    }
  }
  return Lexicon(std::move(entries), std::move(registry), combine_digests(digests));
}

std::span<const std::size_t> Lexicon::lookup(const std::string& surface) const {
  const auto it = index_.find(surface);
  if (it == index_.end()) return {};
  return it->second;
}

}  // namespace stereotax::lexicon
