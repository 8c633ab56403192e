#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "stereotax/error.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::stats {
namespace {

struct TermAccumulator {
  std::size_t responses = 0;
  std::vector<std::size_t> hits;
  std::vector<double> direction_sum;
  std::vector<std::size_t> direction_n;
  std::vector<double> valence_sum;

  explicit TermAccumulator(std::size_t dims)
      : hits(dims, 0), direction_sum(dims, 0.0), direction_n(dims, 0), valence_sum(dims, 0.0) {}
};

struct CategoryAccumulator {
  std::vector<std::string> term_order;
  std::map<std::string, TermAccumulator> terms;
  double overall_sum = 0.0;
  std::size_t overall_n = 0;
  std::vector<std::string> rated_terms;
  std::map<std::string, int> ratings;
};

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.n = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  // Deviations from the first value, so identical inputs give SE exactly 0.
  const double shift = values.front();
  double d_sum = 0.0;
  for (const double v : values) d_sum += v - shift;
  const double d_mean = d_sum / n;
  s.mean = shift + d_mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (const double v : values) ss += (v - shift - d_mean) * (v - shift - d_mean);
    s.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

}  // namespace

Aggregation aggregate(std::span<const CodedResponse> responses, std::span<const TermRating> ratings,
                      std::size_t n_dimensions, std::span<const std::string> categories) {
  std::vector<std::string> order(categories.begin(), categories.end());
  std::map<std::string, CategoryAccumulator> acc;
  for (const auto& c : order) acc[c];
  const bool declared = !categories.empty();

  for (const auto& r : responses) {
    if (r.coding.presence.size() != n_dimensions) {
      throw Error(ErrorKind::kAnalysis, "coding for '" + r.term + "' has " + std::to_string(r.coding.presence.size()) +
                                            " dimensions, expected " + std::to_string(n_dimensions));
    }
    auto it = acc.find(r.category);
    if (it == acc.end()) {
      if (declared) throw Error(ErrorKind::kAnalysis, "coding for unknown category '" + r.category + "'");
      order.push_back(r.category);
      it = acc.emplace(r.category, CategoryAccumulator{}).first;
    }
    auto& cat = it->second;
    auto term_it = cat.terms.find(r.term);
    if (term_it == cat.terms.end()) {
      cat.term_order.push_back(r.term);
      term_it = cat.terms.emplace(r.term, TermAccumulator(n_dimensions)).first;
    }
    auto& term = term_it->second;
    ++term.responses;
    for (std::size_t d = 0; d < n_dimensions; ++d) {
      if (!r.coding.presence[d]) continue;
      ++term.hits[d];
      if (r.coding.direction[d]) {
        term.direction_sum[d] += *r.coding.direction[d];
        ++term.direction_n[d];
      }
      if (r.coding.valence[d]) term.valence_sum[d] += *r.coding.valence[d];
    }
    if (const auto v = r.coding.response_valence()) {
      cat.overall_sum += *v;
      ++cat.overall_n;
    }
  }
  for (const auto& rating : ratings) {
    auto it = acc.find(rating.category);
    if (it == acc.end() || !rating.rating) continue;
    it->second.ratings[rating.term] = *rating.rating;
  }

  Aggregation out;
  for (const auto& name : order) {
    const auto& cat = acc.at(name);
    if (cat.terms.empty()) {
      out.excluded.push_back({name, "no usable terms"});
      continue;
    }
    CategoryProfile p;
    p.category = name;
    p.prevalence.assign(n_dimensions, 0.0);
    p.response_rate.assign(n_dimensions, 0.0);
    p.direction.assign(n_dimensions, std::nullopt);
    p.valence.assign(n_dimensions, std::nullopt);
    p.n_terms = cat.terms.size();
    std::vector<double> dir_sum(n_dimensions, 0.0), val_sum(n_dimensions, 0.0);
    std::vector<std::size_t> dir_n(n_dimensions, 0), val_n(n_dimensions, 0);
    for (const auto& term_name : cat.term_order) {
      const auto& t = cat.terms.at(term_name);
      p.n_responses += t.responses;
      for (std::size_t d = 0; d < n_dimensions; ++d) {
        p.prevalence[d] += static_cast<double>(t.hits[d]) / static_cast<double>(t.responses);
        if (t.direction_n[d] > 0) {
          dir_sum[d] += t.direction_sum[d] / static_cast<double>(t.direction_n[d]);
          ++dir_n[d];
        }
        if (t.hits[d] > 0) {
          val_sum[d] += t.valence_sum[d] / static_cast<double>(t.hits[d]);
          ++val_n[d];
        }
      }
    }
    const double terms = static_cast<double>(p.n_terms);
    const double per_term = static_cast<double>(p.n_responses) / terms;
    for (std::size_t d = 0; d < n_dimensions; ++d) {
      p.prevalence[d] /= terms;
      p.response_rate[d] = p.prevalence[d] * per_term;
      if (dir_n[d] > 0) p.direction[d] = dir_sum[d] / static_cast<double>(dir_n[d]);
      if (val_n[d] > 0) p.valence[d] = val_sum[d] / static_cast<double>(val_n[d]);
    }
    if (cat.overall_n > 0) p.overall_valence = cat.overall_sum / static_cast<double>(cat.overall_n);
    double rating_sum = 0.0;
    std::size_t rating_n = 0;
    for (const auto& [term, value] : cat.ratings) {
      if (!cat.terms.count(term)) continue;
      rating_sum += value;
      ++rating_n;
    }
    if (rating_n > 0) p.internal_valence = rating_sum / static_cast<double>(rating_n);
    out.profiles.push_back(std::move(p));
  }
  return out;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kPrevalence: return "prevalence";
    case Metric::kDirection: return "direction";
    case Metric::kValence: return "valence";
  }
  return "unknown";
}

std::optional<double> metric_value(const CategoryProfile& profile, Metric metric, std::size_t dim) {
  switch (metric) {
    case Metric::kPrevalence: return profile.prevalence.at(dim);
    case Metric::kDirection: return profile.direction.at(dim);
    case Metric::kValence: return profile.valence.at(dim);
  }
  return std::nullopt;
}

const MetricSummary& DimensionSummary::get(Metric metric) const {
  switch (metric) {
    case Metric::kPrevalence: return prevalence;
    case Metric::kDirection: return direction;
    case Metric::kValence: return valence;
  }
  return prevalence;
}

std::vector<DimensionSummary> summarize_dimensions(std::span<const CategoryProfile> profiles,
                                                   const lexicon::DimensionRegistry& registry) {
  std::vector<DimensionSummary> out;
  for (std::size_t d = 0; d < registry.size(); ++d) {
    std::vector<double> prev, rate, dir, val;
    for (const auto& p : profiles) {
      prev.push_back(p.prevalence.at(d));
      rate.push_back(p.response_rate.at(d));
      if (p.direction.at(d)) dir.push_back(*p.direction[d]);
      if (p.valence.at(d)) val.push_back(*p.valence[d]);
    }
    DimensionSummary s;
    s.dimension = d;
    s.name = registry.name(d);
    s.prevalence = summarize(prev);
    s.response_rate = summarize(rate);
    s.direction = summarize(dir);
    s.valence = summarize(val);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DimensionSummary> sorted_by_mean(std::vector<DimensionSummary> rows, Metric metric) {
  std::stable_sort(rows.begin(), rows.end(), [metric](const DimensionSummary& a, const DimensionSummary& b) {
    const auto& ma = a.get(metric).mean;
    const auto& mb = b.get(metric).mean;
    if (ma && mb) return *ma > *mb;
    return ma.has_value() && !mb.has_value();
  });
  return rows;
}

}  // namespace stereotax::stats
