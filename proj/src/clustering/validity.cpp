#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stereotax/clustering.hpp"
#include "stereotax/error.hpp"
#include "stereotax/kernels.hpp"
#include "stereotax/rng.hpp"

namespace stereotax::clustering {
namespace {

constexpr std::size_t kExactDunnLimit = 8000;

void check_solution(const Matrix& data, const ClusterSolution& s) {
  if (data.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "validity index on empty data");
  if (s.labels.size() != data.rows() || s.centroids.rows() != s.k || s.centroids.cols() != data.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "cluster solution does not match data shape");
  }
  for (const auto l : s.labels) {
    if (l >= s.k) throw Error(ErrorKind::kInvalidArgument, "cluster label out of range");
  }
}

std::vector<std::size_t> cluster_sizes(const ClusterSolution& s) {
  std::vector<std::size_t> counts(s.k, 0);
  for (const auto l : s.labels) ++counts[l];
  return counts;
}

Matrix cluster_means(const Matrix& data, const ClusterSolution& s, const std::vector<std::size_t>& counts) {
  Matrix means(s.k, data.cols());
  for (std::size_t i = 0; i < data.rows(); ++i) kernels::axpy(1.0, data.row(i), means.row(s.labels[i]));
  for (std::size_t c = 0; c < s.k; ++c) {
    if (counts[c] == 0) continue;
    for (auto& v : means.row(c)) v /= static_cast<double>(counts[c]);
  }
  return means;
}

double total_sum_of_squares(const Matrix& data) {
  std::vector<double> mean(data.cols(), 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) kernels::axpy(1.0, data.row(i), mean);
  for (auto& v : mean) v /= static_cast<double>(data.rows());
  double tss = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) tss += kernels::squared_distance(data.row(i), mean);
  return tss;
}

double within_sum_of_squares(const Matrix& data, const ClusterSolution& s, const Matrix& means) {
  double w = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) w += kernels::squared_distance(data.row(i), means.row(s.labels[i]));
  return w;
}

Matrix uniform_reference(const Matrix& data, Rng& rng) {
  const std::size_t d = data.cols();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto r = data.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
  }
  Matrix ref(data.rows(), d);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) ref(i, j) = lo[j] + (hi[j] - lo[j]) * rng.uniform();
  }
  return ref;
}

double safe_log(double w) { return std::log(std::max(w, 1e-300)); }

}  // namespace

double silhouette(const Matrix& data, const ClusterSolution& solution) {
  check_solution(data, solution);
  const std::size_t n = data.rows();
  Matrix unit = data;
  normalize_rows(unit);
  const auto counts = cluster_sizes(solution);
  // Mean cosine dissimilarity to a cluster follows from the cluster's sum of
  // unit vectors: sum_j (1 - x.y_j) = |C| - x.S_C.
  Matrix sums(solution.k, data.cols());
  for (std::size_t i = 0; i < n; ++i) kernels::axpy(1.0, unit.row(i), sums.row(solution.labels[i]));

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = solution.labels[i];
    if (counts[own] <= 1) continue;  // singleton contributes 0
    const double a = (static_cast<double>(counts[own]) - kernels::dot(unit.row(i), sums.row(own))) /
                     static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < solution.k; ++c) {
      if (c == own || counts[c] == 0) continue;
      const double dc = 1.0 - kernels::dot(unit.row(i), sums.row(c)) / static_cast<double>(counts[c]);
      b = std::min(b, dc);
    }
    if (!std::isfinite(b)) continue;
    const double a0 = std::max(a, 0.0);
    const double b0 = std::max(b, 0.0);
    const double denom = std::max(a0, b0);
    if (denom > 0.0) total += std::clamp((b0 - a0) / denom, -1.0, 1.0);
  }
  return total / static_cast<double>(n);
}

double calinski_harabasz(const Matrix& data, const ClusterSolution& solution) {
  check_solution(data, solution);
  const std::size_t n = data.rows();
  const std::size_t k = solution.k;
  if (k < 2 || k >= n) throw Error(ErrorKind::kInvalidArgument, "Calinski-Harabasz needs 2 <= k < N");
  const auto counts = cluster_sizes(solution);
  const Matrix means = cluster_means(data, solution, counts);
  const double tss = total_sum_of_squares(data);
  const double w = within_sum_of_squares(data, solution, means);
  const double b = std::max(tss - w, 0.0);
  if (w <= 0.0) return std::numeric_limits<double>::infinity();
  return (b / static_cast<double>(k - 1)) / (w / static_cast<double>(n - k));
}

double davies_bouldin(const Matrix& data, const ClusterSolution& solution) {
  check_solution(data, solution);
  const auto counts = cluster_sizes(solution);
  const Matrix means = cluster_means(data, solution, counts);
  std::vector<double> scatter(solution.k, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    scatter[solution.labels[i]] += std::sqrt(kernels::squared_distance(data.row(i), means.row(solution.labels[i])));
  }
  std::size_t used = 0;
  for (std::size_t c = 0; c < solution.k; ++c) {
    if (counts[c] > 0) {
      scatter[c] /= static_cast<double>(counts[c]);
      ++used;
    }
  }
  if (used < 2) throw Error(ErrorKind::kInvalidArgument, "Davies-Bouldin needs two non-empty clusters");
  double total = 0.0;
  for (std::size_t c = 0; c < solution.k; ++c) {
    if (counts[c] == 0) continue;
    double worst = 0.0;
    for (std::size_t o = 0; o < solution.k; ++o) {
      if (o == c || counts[o] == 0) continue;
      const double sep = std::sqrt(kernels::squared_distance(means.row(c), means.row(o)));
      const double ratio = sep > 0.0 ? (scatter[c] + scatter[o]) / sep
                                     : ((scatter[c] + scatter[o]) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      worst = std::max(worst, ratio);
    }
    total += worst;
  }
  return total / static_cast<double>(used);
}

double dunn(const Matrix& data, const ClusterSolution& solution) {
  check_solution(data, solution);
  const std::size_t n = data.rows();
  double min_between = std::numeric_limits<double>::infinity();
  double max_within = 0.0;
  if (n <= kExactDunnLimit) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d2 = kernels::squared_distance(data.row(i), data.row(j));
        if (solution.labels[i] == solution.labels[j]) {
          max_within = std::max(max_within, d2);
        } else {
          min_between = std::min(min_between, d2);
        }
      }
    }
    min_between = std::sqrt(min_between);
    max_within = std::sqrt(max_within);
  } else {
    // Centroid form: closest centroid pair over the widest cluster diameter
    // bound (twice its largest member-to-centroid distance).
    const auto counts = cluster_sizes(solution);
    const Matrix means = cluster_means(data, solution, counts);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = std::sqrt(kernels::squared_distance(data.row(i), means.row(solution.labels[i])));
      max_within = std::max(max_within, 2.0 * r);
    }
    for (std::size_t a = 0; a < solution.k; ++a) {
      for (std::size_t b = a + 1; b < solution.k; ++b) {
        if (counts[a] == 0 || counts[b] == 0) continue;
        min_between = std::min(min_between, std::sqrt(kernels::squared_distance(means.row(a), means.row(b))));
      }
    }
  }
  if (!std::isfinite(min_between)) return 0.0;
  if (max_within <= 0.0) return std::numeric_limits<double>::infinity();
  return min_between / max_within;
}

IndexVote tally_votes(std::map<std::string, std::size_t> best_k) {
  if (best_k.empty()) throw Error(ErrorKind::kInvalidArgument, "no index choices to vote on");
  IndexVote vote;
  for (const auto& [index, k] : best_k) ++vote.tally[k];
  std::size_t top = 0;
  for (const auto& [k, votes] : vote.tally) {
    if (votes >= top) {  // ascending k, so >= keeps the larger k on ties
      top = votes;
      vote.winner = k;
    }
  }
  vote.best_k = std::move(best_k);
  return vote;
}

IndexVote select_k(const Matrix& data, const SelectKOptions& options) {
  const std::size_t n = data.rows();
  if (options.k_min < 2 || options.k_min > options.k_max || n < 3 || options.k_max > n - 1) {
    throw Error(ErrorKind::kInvalidArgument, "k range [" + std::to_string(options.k_min) + ", " +
                                                 std::to_string(options.k_max) + "] must lie within [2, " +
                                                 std::to_string(n >= 1 ? n - 1 : 0) + "]");
  }
  // Solutions for k_min..k_max+1 feed the gap rule and the elbow.
  const std::size_t k_top = options.k_max + 1;
  std::map<std::size_t, ClusterSolution> solutions;
  for (std::size_t k = options.k_min; k <= k_top; ++k) {
    solutions.emplace(k, kmeans(data, k, mix_seed(options.seed, k), options.restarts));
  }
  auto inertia_at = [&](std::size_t k) {
    return k == 1 ? total_sum_of_squares(data) : solutions.at(k).inertia;
  };

  std::map<std::size_t, double> gap;
  std::map<std::size_t, double> gap_se;
  if (options.gap_references > 0) {
    const std::size_t b_count = options.gap_references;
    std::map<std::size_t, std::vector<double>> ref_logs;
    for (std::size_t b = 0; b < b_count; ++b) {
      Rng rng(mix_seed(options.seed ^ 0x6761707265660000ULL, b));
      const Matrix ref = uniform_reference(data, rng);
      for (std::size_t k = options.k_min; k <= k_top; ++k) {
        const auto sol = kmeans(ref, k, mix_seed(rng.next(), k), options.gap_restarts);
        ref_logs[k].push_back(safe_log(sol.inertia));
      }
    }
    for (const auto& [k, logs] : ref_logs) {
      const double mean = std::accumulate(logs.begin(), logs.end(), 0.0) / static_cast<double>(logs.size());
      double ss = 0.0;
      for (const double v : logs) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(logs.size()));
      gap[k] = mean - safe_log(inertia_at(k));
      gap_se[k] = sd * std::sqrt(1.0 + 1.0 / static_cast<double>(b_count));
    }
  }

  std::vector<ValidityScores> scores;
  for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
    const auto& sol = solutions.at(k);
    ValidityScores s;
    s.k = k;
    s.inertia = sol.inertia;
    s.silhouette = silhouette(data, sol);
    s.calinski_harabasz = calinski_harabasz(data, sol);
    s.davies_bouldin = davies_bouldin(data, sol);
    s.dunn = dunn(data, sol);
    if (gap.count(k)) {
      s.gap = gap.at(k);
      s.gap_se = gap_se.at(k);
    }
    s.elbow = inertia_at(k - 1) - 2.0 * inertia_at(k) + inertia_at(k + 1);
    scores.push_back(s);
  }

  // Per-index choice; strict comparisons in ascending k keep the smallest k
  // among exact ties within one index.
  auto argbest = [&](auto value, bool maximize) {
    std::size_t best = scores.front().k;
    double best_v = value(scores.front());
    for (const auto& s : scores) {
      const double v = value(s);
      if (maximize ? v > best_v : v < best_v) {
        best_v = v;
        best = s.k;
      }
    }
    return best;
  };
  std::map<std::string, std::size_t> best_k;
  best_k["silhouette"] = argbest([](const ValidityScores& s) { return s.silhouette; }, true);
  best_k["calinski_harabasz"] = argbest([](const ValidityScores& s) { return s.calinski_harabasz; }, true);
  best_k["davies_bouldin"] = argbest([](const ValidityScores& s) { return s.davies_bouldin; }, false);
  best_k["dunn"] = argbest([](const ValidityScores& s) { return s.dunn; }, true);
  best_k["elbow"] = argbest([](const ValidityScores& s) { return *s.elbow; }, true);
  if (!gap.empty()) {
    // Smallest k with Gap(k) >= Gap(k+1) - s(k+1).
    std::size_t choice = options.k_max;
    for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
      if (gap.at(k) >= gap.at(k + 1) - gap_se.at(k + 1)) {
        choice = k;
        break;
      }
    }
    best_k["gap"] = choice;
  }

  IndexVote vote = tally_votes(std::move(best_k));
  vote.scores = std::move(scores);
  return vote;
}

}  // namespace stereotax::clustering
