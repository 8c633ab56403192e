#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_set>

#include "stereotax/error.hpp"
#include "stereotax/harness.hpp"
#include "stereotax/lexicon.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::harness {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_any(std::string_view haystack, const std::vector<std::string>& needles) {
  return std::any_of(needles.begin(), needles.end(), [&](const std::string& n) {
    return !n.empty() && haystack.find(lower(n)) != std::string_view::npos;
  });
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = c == ' ' || c == '\t';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

// Removes a leading list marker ("12.", "3)", "(4)", "-", "*", "•").
// Returns true when one was found.
bool strip_marker(std::string_view& line) {
  std::string_view s = line;
  bool found = false;
  if (!s.empty() && s.front() == '(') {
    std::size_t i = 1;
    while (i < s.size() && is_digit(s[i])) ++i;
    if (i > 1 && i < s.size() && s[i] == ')') {
      s.remove_prefix(i + 1);
      found = true;
    }
  }
  if (!found) {
    std::size_t i = 0;
    while (i < s.size() && is_digit(s[i])) ++i;
    if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')' || s[i] == ']' || s[i] == ':')) {
      s.remove_prefix(i + 1);
      found = true;
    }
  }
  if (!found) {
    if (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '+')) {
      std::size_t i = 0;
      while (i < s.size() && s[i] == s.front()) ++i;
      // "**bold**" is emphasis, not a bullet.
      if (!(s.front() == '*' && i >= 2)) {
        s.remove_prefix(i);
        found = true;
      }
    } else if (s.substr(0, 3) == "\xE2\x80\xA2" || s.substr(0, 2) == "\xC2\xB7") {
      s.remove_prefix(s.substr(0, 3) == "\xE2\x80\xA2" ? 3 : 2);
      found = true;
    }
  }
  if (found) line = trim(s);
  return found;
}

std::string_view clean_item(std::string_view s) {
  auto junk = [](char c) {
    return c == '"' || c == '\'' || c == '`' || c == '*' || c == '_' || c == '.' || c == ',' || c == ';' ||
           c == ':' || c == '!' || c == '?' || c == ' ' || c == '\t';
  };
  while (!s.empty() && junk(s.front())) s.remove_prefix(1);
  while (!s.empty() && junk(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::kRefusal: return "refusal";
    case FailureReason::kWarningsOnly: return "warnings-only";
    case FailureReason::kUnknownTerm: return "unknown-term";
  }
  return "unknown";
}

FailureReason failure_reason_from_string(std::string_view s) {
  if (s == "refusal") return FailureReason::kRefusal;
  if (s == "warnings-only") return FailureReason::kWarningsOnly;
  if (s == "unknown-term") return FailureReason::kUnknownTerm;
  throw Error(ErrorKind::kParse, "unknown failure reason '" + std::string(s) + "'");
}

ParsedList parse_association_list(std::string_view raw, const ParseOptions& options) {
  ParsedList out;
  const std::string lowered_reply = lower(raw);
  if (contains_any(lowered_reply, options.unknown_term_patterns)) {
    out.failure = FailureReason::kUnknownTerm;
    out.dropped.push_back({std::string(trim(raw)), "unknown-term"});
    return out;
  }

  std::unordered_set<std::string> seen;
  bool saw_refusal = false;
  for (const auto& raw_line : split(raw, '\n')) {
    std::string_view line = trim(raw_line);
    while (!line.empty() && line.front() == '#') line.remove_prefix(1);
    line = trim(line);
    if (line.empty()) continue;
    const bool numbered = strip_marker(line);
    if (line.empty()) continue;

    const std::string low = lower(line);
    const std::size_t words = word_count(line);
    if (contains_any(low, options.refusal_patterns)) {
      saw_refusal = true;
      out.dropped.push_back({std::string(line), "refusal"});
      continue;
    }
    if (words > 1 && contains_any(low, options.warning_patterns)) {
      out.dropped.push_back({std::string(line), "warning"});
      continue;
    }
    if (!numbered && line.back() == ':') {
      out.dropped.push_back({std::string(line), "header"});
      continue;
    }

    std::vector<std::string> parts = split(line, ',');
    const bool comma_list =
        parts.size() > 1 && std::all_of(parts.begin(), parts.end(), [&](const std::string& p) {
          return word_count(p) <= options.max_unnumbered_words;
        });
    if (!comma_list) {
      if (!numbered && words > options.max_unnumbered_words) {
        out.dropped.push_back({std::string(line), "prose"});
        continue;
      }
      parts.assign(1, std::string(line));
    }

    for (const auto& part : parts) {
      const auto item = clean_item(trim(part));
      if (item.empty()) continue;
      std::string norm = lexicon::normalize(item);
      if (norm.empty() || seen.contains(norm)) continue;
      if (out.items.size() == static_cast<std::size_t>(kMaxAssociations)) {
        out.dropped.push_back({std::string(item), "overflow"});
        continue;
      }
      seen.insert(norm);
      const int order = static_cast<int>(out.items.size()) + 1;
      out.items.push_back({std::string(item), std::move(norm), order});
    }
  }
  if (out.items.empty()) out.failure = saw_refusal ? FailureReason::kRefusal : FailureReason::kWarningsOnly;
  return out;
}

std::optional<int> parse_valence_rating(std::string_view raw) {
  const std::size_t n = raw.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_digit(raw[i])) continue;
    std::size_t j = i;
    while (j < n && is_digit(raw[j])) ++j;
    const bool single = j - i == 1;
    const bool decimal_before = i >= 2 && (raw[i - 1] == '.' || raw[i - 1] == ',') && is_digit(raw[i - 2]);
    const bool decimal_after = j + 1 < n && (raw[j] == '.' || raw[j] == ',') && is_digit(raw[j + 1]);
    if (single && !decimal_before && !decimal_after && raw[i] >= '1' && raw[i] <= '5') return raw[i] - '0';
    // Skip the rest of this number, including any fractional part.
    i = j;
    while (i + 1 < n && (raw[i] == '.' || raw[i] == ',') && is_digit(raw[i + 1])) {
      ++i;
      while (i < n && is_digit(raw[i])) ++i;
    }
    if (i > 0) --i;
  }
  return std::nullopt;
}

}  // namespace stereotax::harness
