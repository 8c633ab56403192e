#include <string>
#include <vector>

#include "stereotax/error.hpp"
#include "stereotax/lexicon.hpp"

namespace stereotax::lexicon {

std::optional<double> DimensionCoding::response_valence() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : valence) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

DimensionCoding code_response(std::string_view normalized, const Lexicon& lexicon) {
  const std::size_t dims = lexicon.registry().size();
  std::vector<double> dir_sum(dims, 0.0), val_sum(dims, 0.0);
  std::vector<std::size_t> dir_n(dims, 0), val_n(dims, 0);

  auto absorb = [&](std::span<const std::size_t> hits) {
    for (const auto idx : hits) {
      const auto& e = lexicon.entries()[idx];
      val_sum[e.dimension] += e.valence;
      ++val_n[e.dimension];
      if (e.direction) {
        dir_sum[e.dimension] += *e.direction;
        ++dir_n[e.dimension];
      }
    }
  };

  const std::string whole(normalized);
  if (const auto hits = lexicon.lookup(whole); !hits.empty()) {
    absorb(hits);
  } else {
    std::size_t i = 0;
    while (i < whole.size()) {
      while (i < whole.size() && whole[i] == ' ') ++i;
      const std::size_t start = i;
      while (i < whole.size() && whole[i] != ' ') ++i;
      if (i > start) absorb(lexicon.lookup(whole.substr(start, i - start)));
    }
  }

  DimensionCoding out;
  out.presence.assign(dims, 0);
  out.direction.assign(dims, std::nullopt);
  out.valence.assign(dims, std::nullopt);
  out.no_match = true;
  for (std::size_t d = 0; d < dims; ++d) {
    if (val_n[d] == 0) continue;
    out.presence[d] = 1;
    out.no_match = false;
    out.valence[d] = val_sum[d] / static_cast<double>(val_n[d]);
    if (dir_n[d] > 0) out.direction[d] = dir_sum[d] / static_cast<double>(dir_n[d]);
  }
  return out;
}

double coverage(std::span<const DimensionCoding> codings) {
  if (codings.empty()) throw Error(ErrorKind::kInvalidArgument, "coverage of an empty set of codings");
  std::size_t misses = 0;
  for (const auto& c : codings) misses += c.no_match ? 1 : 0;
  return 1.0 - static_cast<double>(misses) / static_cast<double>(codings.size());
}

double coverage(std::span<const DimensionCoding> codings, std::span<const std::size_t> dims) {
  if (codings.empty()) throw Error(ErrorKind::kInvalidArgument, "coverage of an empty set of codings");
  std::size_t hits = 0;
  for (const auto& c : codings) {
    for (const auto d : dims) {
      if (d < c.presence.size() && c.presence[d]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(codings.size());
}

}  // namespace stereotax::lexicon
