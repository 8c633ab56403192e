#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stereotax::lexicon {

/// Ordered set of reported stereotype dimensions plus the subdimension
/// rollup map (e.g. Family -> Other).
class DimensionRegistry {
 public:
  struct Dimension {
    std::string name;
    bool has_direction = false;
  };

  DimensionRegistry() = default;
  DimensionRegistry(std::vector<Dimension> dimensions, std::map<std::string, std::string> rollup);

  /// The fourteen-dimension taxonomy with direction on Assertiveness,
  /// Ability, Status, Beliefs, Sociability, Morality, Deviance and Health.
  static DimensionRegistry standard();

  /// Registry file: header `id  has_direction  rollup`; a row with a
  /// non-empty rollup declares a subdimension of that reported dimension.
  static DimensionRegistry load(const std::filesystem::path& path);

  std::size_t size() const noexcept { return dimensions_.size(); }
  const std::vector<Dimension>& dimensions() const noexcept { return dimensions_; }
  const std::map<std::string, std::string>& rollup() const noexcept { return rollup_; }
  const std::string& name(std::size_t dim) const { return dimensions_.at(dim).name; }
  bool has_direction(std::size_t dim) const { return dimensions_.at(dim).has_direction; }

  /// Index of a reported dimension or of the dimension a subdimension rolls
  /// up to. Matching ignores case, spaces, '_' and '-'.
  std::optional<std::size_t> resolve(std::string_view id) const;

  /// Indices of the listed dimension names; throws on unknown names.
  std::vector<std::size_t> indices(std::span<const std::string> names) const;

  std::string digest() const;

 private:
  std::vector<Dimension> dimensions_;
  std::map<std::string, std::string> rollup_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

struct DictionaryEntry {
  std::string surface;
  std::size_t dimension = 0;
  std::string subdimension;
  std::optional<int> direction;
  double valence = 0.0;
};

/// Immutable after construction; safe for concurrent read-only coding.
class Lexicon {
 public:
  Lexicon() = default;

  /// Validates entries: surface normalized, direction in {-1,+1} and only on
  /// directional dimensions (where it is required), valence in [-1,1], no
  /// duplicate (surface, dimension) pair.
  Lexicon(std::vector<DictionaryEntry> entries, DimensionRegistry registry, std::string digest = {});

  /// Dictionary files: header `surface dimension subdimension direction
  /// valence`. Errors name file and line.
  static Lexicon load(std::span<const std::filesystem::path> paths, DimensionRegistry registry);

  const DimensionRegistry& registry() const noexcept { return registry_; }
  std::span<const DictionaryEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& digest() const noexcept { return digest_; }

  /// Entry indices for an exact normalized surface, in load order.
  std::span<const std::size_t> lookup(const std::string& surface) const;

 private:
  std::vector<DictionaryEntry> entries_;
  DimensionRegistry registry_;
  std::string digest_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

/// Lowercase, dashes to spaces, whitespace collapsed, each token singular.
std::string normalize(std::string_view text);

/// Singular form of one lowercase token.
std::string singularize(std::string_view token);

struct DimensionCoding {
  std::size_t response_id = 0;
  std::vector<std::uint8_t> presence;
  std::vector<std::optional<double>> direction;
  std::vector<std::optional<double>> valence;
  bool no_match = true;

  /// Mean valence over the dimensions present; nullopt when no_match.
  std::optional<double> response_valence() const;

  bool operator==(const DimensionCoding&) const = default;
};

/// Full-string lookup first; otherwise every whitespace token is looked up
/// and matches are pooled per dimension. Direction and valence are means of
/// the matched entries.
DimensionCoding code_response(std::string_view normalized, const Lexicon& lexicon);

/// 1 - no-match share; with `dims`, the share matching at least one of them.
double coverage(std::span<const DimensionCoding> codings);
double coverage(std::span<const DimensionCoding> codings, std::span<const std::size_t> dims);

}  // namespace stereotax::lexicon
