#include <algorithm>
#include <cmath>

#include "stereotax/clustering.hpp"
#include "stereotax/error.hpp"
#include "stereotax/kernels.hpp"

namespace stereotax::clustering {

PrototypeList prototypes(const ClusterSolution& solution, const Matrix& data, std::span<const std::string> texts,
                         std::size_t top_n) {
  if (top_n < 1) throw Error(ErrorKind::kInvalidArgument, "top_n must be >= 1");
  if (solution.labels.size() != data.rows() || texts.size() != data.rows() ||
      solution.centroids.rows() != solution.k || solution.centroids.cols() != data.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "cluster solution, data and texts disagree in shape");
  }
  std::vector<double> centroid_norm(solution.k, 0.0);
  for (std::size_t c = 0; c < solution.k; ++c) {
    centroid_norm[c] = std::sqrt(kernels::dot(solution.centroids.row(c), solution.centroids.row(c)));
  }
  PrototypeList out(solution.k);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const std::size_t c = solution.labels[i];
    if (c >= solution.k) throw Error(ErrorKind::kInvalidArgument, "cluster label out of range");
    const double row_norm = std::sqrt(kernels::dot(data.row(i), data.row(i)));
    const double denom = row_norm * centroid_norm[c];
    const double sim = denom > 0.0 ? std::clamp(kernels::dot(data.row(i), solution.centroids.row(c)) / denom, -1.0, 1.0)
                                   : 0.0;
    out[c].push_back({texts[i], sim});
  }
  for (auto& members : out) {
    std::sort(members.begin(), members.end(), [](const Prototype& a, const Prototype& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.text < b.text;
    });
    if (members.size() > top_n) members.resize(top_n);
  }
  return out;
}

}  // namespace stereotax::clustering
