#include <algorithm>
#include <cmath>

#include "stereotax/clustering.hpp"
#include "stereotax/error.hpp"
#include "stereotax/kernels.hpp"

namespace stereotax::clustering {

SimilarityMatrix cosine_similarity_matrix(const Matrix& vectors) {
  const std::size_t n = vectors.rows();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "cosine similarity of an empty matrix");
  Matrix unit = vectors;
  normalize_rows(unit);
  SimilarityMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = std::clamp(kernels::dot(unit.row(i), unit.row(j)), -1.0, 1.0);
      s.at(i, j) = c;
      s.at(j, i) = c;
    }
  }
  return s;
}

}  // namespace stereotax::clustering
