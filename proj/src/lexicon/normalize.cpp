#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "stereotax/lexicon.hpp"

namespace stereotax::lexicon {
namespace {

// Plural-looking words that are kept verbatim.
const std::unordered_set<std::string_view>& kept_words() {
  static const std::unordered_set<std::string_view> words{
      "glasses",   "news",      "pants",     "jeans",       "clothes",   "series",    "species",
      "politics",  "economics", "athletics", "physics",     "mathematics", "ethics", "gymnastics",
      "always",    "perhaps",   "sometimes", "christmas",   "diabetes",  "herpes",    "rabies",
      "measles",   "mumps",     "scissors",  "shorts",      "tights",    "chaos",     "ethos",
      "cosmos",    "pathos",    "atlas",     "canvas",      "alias",     "bias",      "texas",
      "kansas",    "arkansas",  "vegas",     "overseas",    "whereas",   "thanks",    "odds",
      "headquarters", "means",  "outskirts", "savings",     "belongings", "surroundings", "manners",
      "lens",      "aids",      "sweats",    "dreadlocks",  "brains",    "looks",     "arts",
  };
  return words;
}

const std::unordered_map<std::string_view, std::string_view>& irregular() {
  static const std::unordered_map<std::string_view, std::string_view> words{
      {"men", "man"},     {"women", "woman"},   {"children", "child"}, {"teeth", "tooth"},
      {"feet", "foot"},   {"mice", "mouse"},    {"geese", "goose"},    {"oxen", "ox"},
      {"wolves", "wolf"}, {"knives", "knife"},  {"wives", "wife"},     {"housewives", "housewife"},
      {"lives", "life"},  {"halves", "half"},   {"thieves", "thief"},  {"selves", "self"},
      {"shelves", "shelf"}, {"leaves", "leaf"}, {"calves", "calf"},    {"loaves", "loaf"},
      {"elves", "elf"},
  };
  return words;
}

// "-ches" words whose singular keeps the trailing e.
const std::unordered_set<std::string_view>& ches_keep_e() {
  static const std::unordered_set<std::string_view> words{
      "aches", "headaches", "stomachaches", "heartaches", "niches", "caches", "moustaches",
      "mustaches", "avalanches", "psyches", "cliches", "quiches", "creches",
  };
  return words;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// UTF-8 dash code points: U+2010, U+2011, U+2012, U+2013, U+2014, U+2015, U+2212.
std::size_t dash_length(std::string_view s, std::size_t i) {
  if (s[i] == '-') return 1;
  if (i + 2 < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    const auto b1 = static_cast<unsigned char>(s[i + 1]);
    const auto b2 = static_cast<unsigned char>(s[i + 2]);
    if (b0 == 0xE2 && b1 == 0x80 && b2 >= 0x90 && b2 <= 0x95) return 3;
    if (b0 == 0xE2 && b1 == 0x88 && b2 == 0x92) return 3;
  }
  return 0;
}

}  // namespace

std::string singularize(std::string_view token) {
  if (kept_words().contains(token)) return std::string(token);
  if (const auto it = irregular().find(token); it != irregular().end()) return std::string(it->second);

  const std::size_t n = token.size();
  if (n < 4 || token.back() != 's') return std::string(token);
  if (ends_with(token, "ss") || ends_with(token, "us") || ends_with(token, "is")) return std::string(token);
  if (!is_alpha(token[n - 2])) return std::string(token);

  auto drop = [&](std::size_t k) { return std::string(token.substr(0, n - k)); };

  if (ends_with(token, "ies")) {
    if (n <= 4) return drop(1);  // ties -> tie
    return drop(3) + "y";
  }
  if (ends_with(token, "sses") || ends_with(token, "xes") || ends_with(token, "zzes") ||
      ends_with(token, "shes")) {
    return drop(2);
  }
  if (ends_with(token, "ches")) return ches_keep_e().contains(token) ? drop(1) : drop(2);
  return drop(1);
}

std::string normalize(std::string_view text) {
  // Lowercase ASCII and turn dashes into spaces.
  std::string spaced;
  spaced.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (const auto len = dash_length(text, i); len > 0) {
      spaced.push_back(' ');
      i += len;
      continue;
    }
    char c = text[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    spaced.push_back(c);
    ++i;
  }

  std::string out;
  out.reserve(spaced.size());
  std::size_t i = 0;
  while (i < spaced.size()) {
    while (i < spaced.size() && is_space(spaced[i])) ++i;
    const std::size_t start = i;
    while (i < spaced.size() && !is_space(spaced[i])) ++i;
    if (i > start) {
      if (!out.empty()) out.push_back(' ');
      out += singularize(std::string_view(spaced).substr(start, i - start));
    }
  }
  return out;
}

}  // namespace stereotax::lexicon
