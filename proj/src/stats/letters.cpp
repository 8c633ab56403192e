#include <algorithm>
#include <cmath>
#include <numeric>

#include "stereotax/error.hpp"
#include "stereotax/parallel.hpp"
#include "stereotax/rng.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::stats {
namespace {

double normal_two_sided(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

char letter_for(std::size_t i) {
  if (i < 26) return static_cast<char>('a' + i);
  if (i < 52) return static_cast<char>('A' + (i - 26));
  throw Error(ErrorKind::kAnalysis, "compact letter display needs more than 52 letters");
}

}  // namespace

std::vector<double> holm(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> adjusted(m, 1.0);
  double running = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double scaled = std::min(1.0, static_cast<double>(m - r) * p[order[r]]);
    running = std::max(running, scaled);
    adjusted[order[r]] = running;
  }
  return adjusted;
}

std::vector<std::string> compact_letters(std::size_t n,
                                         std::span<const std::pair<std::size_t, std::size_t>> rejected) {
  // Insert-absorb: start from one group holding everything, split groups
  // containing a rejected pair, then drop groups contained in another.
  std::vector<std::vector<bool>> groups;
  if (n > 0) groups.emplace_back(n, true);
  for (const auto& [a, b] : rejected) {
    if (a >= n || b >= n || a == b) throw Error(ErrorKind::kInvalidArgument, "invalid rejected pair");
    std::vector<std::vector<bool>> next;
    for (auto& g : groups) {
      if (g[a] && g[b]) {
        auto without_a = g;
        without_a[a] = false;
        auto without_b = g;
        without_b[b] = false;
        next.push_back(std::move(without_a));
        next.push_back(std::move(without_b));
      } else {
        next.push_back(std::move(g));
      }
    }
    std::vector<std::vector<bool>> kept;
    for (std::size_t i = 0; i < next.size(); ++i) {
      bool absorbed = false;
      for (std::size_t j = 0; j < next.size() && !absorbed; ++j) {
        if (i == j) continue;
        bool subset = true;
        for (std::size_t k = 0; k < n && subset; ++k) subset = !next[i][k] || next[j][k];
        // Equal groups: keep the first copy only.
        if (subset && (next[i] != next[j] || j < i)) absorbed = true;
      }
      if (!absorbed) kept.push_back(next[i]);
    }
    groups = std::move(kept);
  }
  // Letters follow the first (display-order) member of each group.
  auto first_member = [n](const std::vector<bool>& g) {
    for (std::size_t k = 0; k < n; ++k) {
      if (g[k]) return k;
    }
    return n;
  };
  std::stable_sort(groups.begin(), groups.end(), [&](const auto& x, const auto& y) {
    const auto fx = first_member(x);
    const auto fy = first_member(y);
    if (fx != fy) return fx < fy;
    return std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end());
  });
  std::vector<std::string> letters(n);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t k = 0; k < n; ++k) {
      if (groups[g][k]) letters[k] += letter_for(g);
    }
  }
  return letters;
}

std::string LetterGroups::letters_of(std::size_t dimension) const {
  for (std::size_t i = 0; i < dimensions.size(); ++i) {
    if (dimensions[i] == dimension) return letters[i];
  }
  return {};
}

LetterGroups pairwise_letters(std::span<const CategoryProfile> profiles, Metric metric, double alpha,
                              std::uint64_t seed, std::size_t resamples) {
  if (profiles.size() < 2) throw Error(ErrorKind::kAnalysis, "pairwise comparisons need at least two categories");
  if (resamples < 2) throw Error(ErrorKind::kInvalidArgument, "pairwise comparisons need at least two resamples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::kInvalidArgument, "alpha must lie in (0, 1)");
  const std::size_t dims = profiles.front().prevalence.size();
  const std::size_t c = profiles.size();

  // Means over the categories where each dimension is observed.
  auto dimension_means = [&](std::span<const std::size_t> sample) {
    std::vector<double> sum(dims, 0.0);
    std::vector<std::size_t> count(dims, 0);
    for (const auto idx : sample) {
      for (std::size_t d = 0; d < dims; ++d) {
        if (const auto v = metric_value(profiles[idx], metric, d)) {
          sum[d] += *v;
          ++count[d];
        }
      }
    }
    std::vector<std::optional<double>> means(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      if (count[d] > 0) means[d] = sum[d] / static_cast<double>(count[d]);
    }
    return means;
  };

  std::vector<std::size_t> all(c);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto observed = dimension_means(all);

  LetterGroups out;
  out.alpha = alpha;
  out.resamples = resamples;
  out.seed = seed;
  for (std::size_t d = 0; d < dims; ++d) {
    if (observed[d]) out.dimensions.push_back(d);
  }
  std::stable_sort(out.dimensions.begin(), out.dimensions.end(),
                   [&](std::size_t a, std::size_t b) { return *observed[a] > *observed[b]; });
  const std::size_t m = out.dimensions.size();
  if (m < 2) {
    out.letters.assign(m, "a");
    return out;
  }

  std::vector<std::vector<std::optional<double>>> boot(resamples);
  parallel_for(resamples, [&](std::size_t b) {
    Rng rng(mix_seed(seed, b));
    std::vector<std::size_t> sample(c);
    for (auto& s : sample) s = static_cast<std::size_t>(rng.below(c));
    boot[b] = dimension_means(sample);
  });

  std::vector<double> raw;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      PairTest t;
      t.a = out.dimensions[i];
      t.b = out.dimensions[j];
      t.difference = *observed[t.a] - *observed[t.b];
      std::vector<double> diffs;
      diffs.reserve(resamples);
      for (const auto& means : boot) {
        if (means[t.a] && means[t.b]) diffs.push_back(*means[t.a] - *means[t.b]);
      }
      if (diffs.size() >= 2) {
        const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size());
        double ss = 0.0;
        for (const double v : diffs) ss += (v - mean) * (v - mean);
        t.se = std::sqrt(ss / static_cast<double>(diffs.size() - 1));
      }
      if (t.se > 0.0) {
        t.p = normal_two_sided(t.difference / t.se);
      } else {
        t.p = t.difference == 0.0 ? 1.0 : 0.0;
      }
      raw.push_back(t.p);
      out.pairs.push_back(t);
    }
  }
  const auto adjusted = holm(raw);
  std::vector<std::pair<std::size_t, std::size_t>> rejected;
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j, ++k) {
      out.pairs[k].p_adjusted = adjusted[k];
      out.pairs[k].rejected = adjusted[k] <= alpha;
      if (out.pairs[k].rejected) rejected.emplace_back(i, j);
    }
  }
  out.letters = compact_letters(m, rejected);
  return out;
}

}  // namespace stereotax::stats
