#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stereotax/client.hpp"
#include "stereotax/harness.hpp"

namespace stereotax::clustering {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Scales every row to unit L2 norm. Throws Error(kInvalidArgument) on a
/// zero row, naming `labels[i]` when labels are given.
void normalize_rows(Matrix& m, std::span<const std::string> labels = {});

/// Unique normalized texts in first-occurrence order.
std::vector<std::string> unique_texts(std::span<const std::string> texts);
std::vector<std::string> unique_responses(std::span<const harness::ResponseRecord> corpus);

struct EmbeddingMatrix {
  std::vector<std::string> texts;
  Matrix vectors;  // unit-norm rows aligned with texts
  std::string source;
  std::string digest;
};

/// Embedding file layout (UTF-8 text):
///   stereotax-embeddings 1
///   <n> <d>
///   <byte length of text> <text> <v1> ... <vd>      (one line per row)
void write_embedding_file(const std::filesystem::path& path, std::span<const std::string> texts, const Matrix& vectors);

struct EmbeddingFile {
  std::vector<std::string> texts;
  Matrix vectors;
  std::string digest;
};

EmbeddingFile read_embedding_file(const std::filesystem::path& path);

struct EmbeddingSource {
  enum class Kind { kFile, kService };
  Kind kind = Kind::kFile;
  std::string location;  // file path or service base URL
  std::size_t batch_size = 1024;
  std::chrono::seconds timeout{120};

  static EmbeddingSource file(std::filesystem::path path);
  static EmbeddingSource service(std::string base_url);
};

/// One unit-norm row per text, order-aligned. File sources must contain
/// every text; services are called as POST <url>/embed {"texts": [...]}.
EmbeddingMatrix fetch_embeddings(std::span<const std::string> texts, const EmbeddingSource& source,
                                 const harness::HttpPost& post = harness::default_http_post());

/// Symmetric N x N cosine similarities, unit diagonal, entries in [-1, 1].
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}
  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

SimilarityMatrix cosine_similarity_matrix(const Matrix& vectors);

struct ClusterSolution {
  std::size_t k = 0;
  std::vector<std::size_t> labels;
  Matrix centroids;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  std::size_t restarts = 0;
  std::size_t iterations = 0;  // of the winning restart
  bool converged = false;
  std::vector<std::vector<double>> inertia_traces;  // per restart, one value per assignment step

  bool operator==(const ClusterSolution&) const = default;
};

inline constexpr std::size_t kDefaultMaxIterations = 300;

/// Lloyd's algorithm with seeded k-means++ starts; best restart by inertia.
/// Points are visited in a canonical (content-sorted) order and clusters are
/// numbered by first appearance in that order, so permuting the input rows
/// permutes the labels identically.
ClusterSolution kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t restarts = 10,
                       std::size_t max_iterations = kDefaultMaxIterations);

/// Mean silhouette using cosine dissimilarity (1 - cos).
double silhouette(const Matrix& data, const ClusterSolution& solution);
double calinski_harabasz(const Matrix& data, const ClusterSolution& solution);
double davies_bouldin(const Matrix& data, const ClusterSolution& solution);
/// Minimum between-cluster point distance over maximum cluster diameter.
double dunn(const Matrix& data, const ClusterSolution& solution);

struct ValidityScores {
  std::size_t k = 0;
  double inertia = 0.0;
  double silhouette = 0.0;
  double calinski_harabasz = 0.0;
  double davies_bouldin = 0.0;
  double dunn = 0.0;
  std::optional<double> gap;
  std::optional<double> gap_se;
  std::optional<double> elbow;  // second difference of inertia
};

struct IndexVote {
  std::map<std::string, std::size_t> best_k;  // per index
  std::map<std::size_t, std::size_t> tally;   // k -> votes
  std::size_t winner = 0;
  std::vector<ValidityScores> scores;
};

/// Majority vote over per-index choices; ties go to the larger k.
IndexVote tally_votes(std::map<std::string, std::size_t> best_k);

struct SelectKOptions {
  std::size_t k_min = 2;
  std::size_t k_max = 10;
  std::uint64_t seed = 1;
  std::size_t restarts = 10;
  std::size_t gap_references = 20;  // 0 disables the gap statistic
  std::size_t gap_restarts = 2;
};

/// Scores every k in [k_min, k_max] with silhouette, Calinski-Harabasz,
/// Davies-Bouldin, Dunn, gap statistic and the inertia elbow, then votes.
IndexVote select_k(const Matrix& data, const SelectKOptions& options);

struct Prototype {
  std::string text;
  double similarity = 0.0;

  bool operator==(const Prototype&) const = default;
};

using PrototypeList = std::vector<std::vector<Prototype>>;

/// Per cluster, the top_n members by cosine similarity to the centroid;
/// exact ties are ordered by text.
PrototypeList prototypes(const ClusterSolution& solution, const Matrix& data, std::span<const std::string> texts,
                         std::size_t top_n);

}  // namespace stereotax::clustering
