#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "stereotax/error.hpp"
#include "stereotax/parallel.hpp"
#include "stereotax/rng.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::stats {
namespace {

// Population variance of the dimension means.
double between_variance(std::span<const double> sums, std::span<const double> counts) {
  double mean = 0.0;
  for (std::size_t d = 0; d < sums.size(); ++d) mean += sums[d] / counts[d];
  mean /= static_cast<double>(sums.size());
  double var = 0.0;
  for (std::size_t d = 0; d < sums.size(); ++d) {
    const double m = sums[d] / counts[d];
    var += (m - mean) * (m - mean);
  }
  return var / static_cast<double>(sums.size());
}

}  // namespace

StatTest omnibus_dimension_test(std::span<const CategoryProfile> profiles, Metric metric, std::uint64_t seed,
                                std::size_t resamples) {
  if (profiles.empty()) throw Error(ErrorKind::kAnalysis, "omnibus test needs category profiles");
  if (resamples < 1) throw Error(ErrorKind::kInvalidArgument, "omnibus test needs at least one resample");
  const std::size_t dims = profiles.front().prevalence.size();

  // Dimensions with at least one observed value, remapped to 0..m-1.
  std::vector<std::size_t> used;
  for (std::size_t d = 0; d < dims; ++d) {
    for (const auto& p : profiles) {
      if (metric_value(p, metric, d)) {
        used.push_back(d);
        break;
      }
    }
  }
  if (used.size() < 2) {
    throw Error(ErrorKind::kAnalysis, "omnibus test on " + std::string(to_string(metric)) +
                                          " needs at least two dimensions with data");
  }
  struct Row {
    std::vector<std::size_t> slots;  // remapped dimension positions observed in this category
    std::vector<double> values;
  };
  std::vector<Row> rows;
  std::vector<double> counts(used.size(), 0.0);
  std::vector<double> sums(used.size(), 0.0);
  for (const auto& p : profiles) {
    Row row;
    for (std::size_t j = 0; j < used.size(); ++j) {
      if (const auto v = metric_value(p, metric, used[j])) {
        row.slots.push_back(j);
        row.values.push_back(*v);
        counts[j] += 1.0;
        sums[j] += *v;
      }
    }
    if (!row.values.empty()) rows.push_back(std::move(row));
  }
  const double observed = between_variance(sums, counts);

  std::vector<std::uint8_t> exceeds(resamples, 0);
  parallel_for(resamples, [&](std::size_t b) {
    Rng rng(mix_seed(seed, b));
    std::vector<double> s(used.size(), 0.0);
    std::vector<double> shuffled;
    for (const auto& row : rows) {
      shuffled = row.values;
      rng.shuffle(shuffled.begin(), shuffled.end());
      for (std::size_t i = 0; i < row.slots.size(); ++i) s[row.slots[i]] += shuffled[i];
    }
    // Relative slack so exact ties under exchangeable data count as ties.
    exceeds[b] = between_variance(s, counts) >= observed * (1.0 - 1e-12) ? 1 : 0;
  });
  const auto hits = std::accumulate(exceeds.begin(), exceeds.end(), std::size_t{0});

  StatTest t;
  t.statistic = observed;
  t.df = static_cast<double>(used.size() - 1);
  t.resamples = resamples;
  t.p = (1.0 + static_cast<double>(hits)) / (1.0 + static_cast<double>(resamples));
  t.method = "permutation";
  t.seed = seed;
  return t;
}

StatTest one_sample_t(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::kAnalysis, "one-sample t needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  StatTest t;
  t.df = n - 1.0;
  t.estimate = mean;
  t.method = "t";
  if (sd == 0.0) {
    if (mean == 0.0) {
      t.statistic = 0.0;
      t.p = 1.0;
    } else {
      t.statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
      t.p = 0.0;
    }
    return t;
  }
  t.statistic = mean / (sd / std::sqrt(n));
  const boost::math::students_t dist(n - 1.0);
  t.p = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t.statistic))), 0.0, 1.0);
  return t;
}

StatTest mean_valence_test(std::span<const CategoryProfile> profiles) {
  std::vector<double> values;
  for (const auto& p : profiles) {
    if (p.overall_valence) values.push_back(*p.overall_valence);
  }
  if (values.size() < 2) throw Error(ErrorKind::kAnalysis, "mean valence test needs at least two categories");
  return one_sample_t(values);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kInvalidArgument, "pearson: columns differ in length");
  if (x.size() < 3) throw Error(ErrorKind::kAnalysis, "pearson needs at least three pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::kAnalysis, "pearson: zero variance column");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kInvalidArgument, "pearson: columns differ in length");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      a.push_back(*x[i]);
      b.push_back(*y[i]);
    }
  }
  return pearson(a, b);
}

}  // namespace stereotax::stats
