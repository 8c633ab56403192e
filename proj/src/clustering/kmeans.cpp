#include <algorithm>
#include <limits>
#include <numeric>

#include "stereotax/clustering.hpp"
#include "stereotax/error.hpp"
#include "stereotax/kernels.hpp"
#include "stereotax/rng.hpp"

namespace stereotax::clustering {
namespace {

// Row indices sorted by content, so every input permutation visits points
// in the same sequence.
std::vector<std::size_t> canonical_order(const Matrix& data) {
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = data.row(a);
    const auto rb = data.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return order;
}

struct RestartResult {
  std::vector<std::size_t> labels;  // canonical positions
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  Matrix centroids(k, d);
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);

  std::size_t pick = static_cast<std::size_t>(rng.below(n));
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += dist2[i];
      if (total > 0.0) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        pick = n;
        for (std::size_t i = 0; i < n; ++i) {
          acc += dist2[i];
          if (acc > target && dist2[i] > 0.0) {
            pick = i;
            break;
          }
        }
        if (pick == n) {
          for (std::size_t i = n; i-- > 0;) {
            if (dist2[i] > 0.0) {
              pick = i;
              break;
            }
          }
        }
      } else {
        // Every point coincides with a centre; take the first unused one.
        pick = 0;
        while (pick < n && chosen[pick]) ++pick;
        if (pick == n) pick = 0;
      }
    }
    chosen[pick] = true;
    const auto src = points.row(pick);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], kernels::squared_distance(points.row(i), centroids.row(c)));
    }
  }
  return centroids;
}

void update_centroids(const Matrix& points, std::span<const std::size_t> labels, Matrix& centroids) {
  const std::size_t k = centroids.rows();
  std::vector<std::size_t> counts(k, 0);
  Matrix sums(k, points.cols());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    kernels::axpy(1.0, points.row(i), sums.row(labels[i]));
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(counts[c]);
    auto dst = centroids.row(c);
    const auto src = sums.row(c);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j] * inv;
  }
}

RestartResult lloyd(const Matrix& points, std::size_t k, Rng& rng, std::size_t max_iterations) {
  const std::size_t n = points.rows();
  RestartResult r;
  r.centroids = seed_plus_plus(points, k, rng);
  r.labels.assign(n, k);  // sentinel: nothing assigned yet
  std::vector<double> dist2(n, 0.0);
  std::vector<std::size_t> counts(k, 0);

  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    bool changed = false;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = kernels::squared_distance(points.row(i), r.centroids.row(0));
      for (std::size_t c = 1; c < k; ++c) {
        const double dd = kernels::squared_distance(points.row(i), r.centroids.row(c));
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (r.labels[i] != best) changed = true;
      r.labels[i] = best;
      dist2[i] = best_d;
      ++counts[best];
    }
    // Repair empty clusters with the point farthest from its centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[r.labels[i]] > 1 && (far == n || dist2[i] > dist2[far])) far = i;
      }
      if (far == n) break;
      --counts[r.labels[far]];
      r.labels[far] = c;
      ++counts[c];
      dist2[far] = 0.0;
      const auto src = points.row(far);
      std::copy(src.begin(), src.end(), r.centroids.row(c).begin());
      changed = true;
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += dist2[i];
    r.trace.push_back(inertia);
    r.iterations = iter;
    if (!changed) {
      r.converged = true;
      break;
    }
    update_centroids(points, r.labels, r.centroids);
  }
  if (!r.converged) {
    // Centroids were refreshed after the last assignment; report inertia
    // against them.
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inertia += kernels::squared_distance(points.row(i), r.centroids.row(r.labels[i]));
    }
    r.trace.push_back(inertia);
  }
  r.inertia = r.trace.back();
  return r;
}

}  // namespace

ClusterSolution kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t restarts,
                       std::size_t max_iterations) {
  const std::size_t n = data.rows();
  if (k < 2 || k > n) {
    throw Error(ErrorKind::kInvalidArgument, "k must lie in [2, " + std::to_string(n) + "], got " + std::to_string(k));
  }
  if (restarts < 1) throw Error(ErrorKind::kInvalidArgument, "restarts must be >= 1");
  if (max_iterations < 1) throw Error(ErrorKind::kInvalidArgument, "max_iterations must be >= 1");

  const auto order = canonical_order(data);
  Matrix points(n, data.cols());
  for (std::size_t p = 0; p < n; ++p) {
    const auto src = data.row(order[p]);
    std::copy(src.begin(), src.end(), points.row(p).begin());
  }

  ClusterSolution best;
  std::optional<RestartResult> winner;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed, r));
    auto result = lloyd(points, k, rng, max_iterations);
    best.inertia_traces.push_back(result.trace);
    if (!winner || result.inertia < winner->inertia) winner = std::move(result);
  }

  // Number clusters by first appearance in canonical order.
  std::vector<std::size_t> relabel(k, k);
  std::size_t next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    auto& slot = relabel[winner->labels[p]];
    if (slot == k) slot = next++;
  }
  for (auto& slot : relabel) {
    if (slot == k) slot = next++;
  }

  best.k = k;
  best.seed = seed;
  best.restarts = restarts;
  best.iterations = winner->iterations;
  best.converged = winner->converged;
  best.inertia = winner->inertia;
  best.labels.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) best.labels[order[p]] = relabel[winner->labels[p]];
  best.centroids = Matrix(k, data.cols());
  for (std::size_t c = 0; c < k; ++c) {
    const auto src = winner->centroids.row(c);
    std::copy(src.begin(), src.end(), best.centroids.row(relabel[c]).begin());
  }
  return best;
}

}  // namespace stereotax::clustering
