#include <algorithm>
#include <cctype>

#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/lexicon.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::lexicon {
namespace {

std::string key_of(std::string_view id) {
  std::string k;
  for (char c : id) {
    if (c == ' ' || c == '_' || c == '-') continue;
    k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return k;
}

bool parse_flag(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no" || s.empty()) return false;
  schema_error(path, line, "has_direction must be 0/1, got '" + std::string(s) + "'");
}

}  // namespace

DimensionRegistry::DimensionRegistry(std::vector<Dimension> dimensions,
                                     std::map<std::string, std::string> rollup)
    : dimensions_(std::move(dimensions)), rollup_(std::move(rollup)) {
  if (dimensions_.empty()) throw Error(ErrorKind::kSchema, "registry has no dimensions");
  for (std::size_t i = 0; i < dimensions_.size(); ++i) {
    const auto key = key_of(dimensions_[i].name);
    if (key.empty()) throw Error(ErrorKind::kSchema, "registry dimension with empty id");
    if (!by_key_.emplace(key, i).second) {
      throw Error(ErrorKind::kSchema, "duplicate registry dimension '" + dimensions_[i].name + "'");
    }
  }
  for (const auto& [sub, target] : rollup_) {
    const auto it = by_key_.find(key_of(target));
    if (it == by_key_.end()) {
      throw Error(ErrorKind::kSchema, "subdimension '" + sub + "' rolls up to unknown dimension '" + target + "'");
    }
    const auto sub_key = key_of(sub);
    if (by_key_.contains(sub_key)) {
      throw Error(ErrorKind::kSchema, "subdimension '" + sub + "' collides with a reported dimension");
    }
    by_key_.emplace(sub_key, it->second);
  }
}

DimensionRegistry DimensionRegistry::standard() {
  return DimensionRegistry(
      {
          {"Sociability", true},
          {"Morality", true},
          {"Ability", true},
          {"Assertiveness", true},
          {"Status", true},
          {"Beliefs", true},
          {"Appearance", false},
          {"Emotion", false},
          {"Occupation", false},
          {"Health", true},
          {"Deviance", true},
          {"Geography", false},
          {"SocialGroups", false},
          {"Other", false},
      },
      {
          {"Arts", "Other"},
          {"Culture", "Other"},
          {"Family", "Other"},
          {"Fortune", "Other"},
          {"Science", "Other"},
      });
}

DimensionRegistry DimensionRegistry::load(const std::filesystem::path& path) {
  const auto table = read_tsv(path);
  const auto c_id = table.column("id");
  const auto c_dir = table.column("has_direction");
  const auto c_roll = table.column("rollup");
  if (c_id == static_cast<std::size_t>(-1) || c_dir == static_cast<std::size_t>(-1)) {
    schema_error(path, 1, "registry header must contain 'id' and 'has_direction'");
  }
  std::vector<Dimension> dims;
  std::map<std::string, std::string> rollup;
  for (const auto& row : table.rows) {
    if (row.cells.size() != table.header.size()) {
      schema_error(path, row.line, "expected " + std::to_string(table.header.size()) + " columns, got " +
                                       std::to_string(row.cells.size()));
    }
    const std::string id(trim(row.cells[c_id]));
    if (id.empty()) schema_error(path, row.line, "empty id");
    const std::string target =
        c_roll == static_cast<std::size_t>(-1) ? std::string() : std::string(trim(row.cells[c_roll]));
    if (target.empty()) {
      dims.push_back({id, parse_flag(row.cells[c_dir], path, row.line)});
    } else if (!rollup.emplace(id, target).second) {
      schema_error(path, row.line, "duplicate subdimension '" + id + "'");
    }
  }
  return DimensionRegistry(std::move(dims), std::move(rollup));
}

std::optional<std::size_t> DimensionRegistry::resolve(std::string_view id) const {
  const auto it = by_key_.find(key_of(id));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> DimensionRegistry::indices(std::span<const std::string> names) const {
  std::vector<std::size_t> out;
  for (const auto& n : names) {
    const auto idx = resolve(n);
    if (!idx) throw Error(ErrorKind::kInvalidArgument, "unknown dimension '" + n + "'");
    out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string DimensionRegistry::digest() const {
  std::string canon;
  for (const auto& d : dimensions_) canon += d.name + '\t' + (d.has_direction ? "1" : "0") + '\n';
  for (const auto& [s, t] : rollup_) canon += s + '\t' + t + '\n';
  return sha256_hex(canon);
}

}  // namespace stereotax::lexicon
