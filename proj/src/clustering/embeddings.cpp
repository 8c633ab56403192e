#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "stereotax/atomic_file.hpp"
#include "stereotax/clustering.hpp"
#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/kernels.hpp"
#include "stereotax/tsv.hpp"

namespace stereotax::clustering {
namespace {

constexpr std::string_view kMagic = "stereotax-embeddings 1";

class Cursor {
 public:
  Cursor(std::string_view text, const std::filesystem::path& path) : text_(text), path_(path) {}

  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t line() const { return line_; }

  std::string_view take_line() {
    const auto end = text_.find('\n', pos_);
    std::string_view out = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    ++line_;
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    return out;
  }

 private:
  std::string_view text_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

std::size_t parse_size(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    schema_error(path, line, "expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw Error(ErrorKind::kInvalidArgument, "matrix data size mismatch");
}

void normalize_rows(Matrix& m, std::span<const std::string> labels) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    const double norm = std::sqrt(kernels::dot(r, r));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      const std::string who = i < labels.size() ? "'" + labels[i] + "'" : "row " + std::to_string(i);
      throw Error(ErrorKind::kInvalidArgument, "zero or non-finite embedding vector for " + who);
    }
    for (auto& v : r) v /= norm;
  }
}

std::vector<std::string> unique_texts(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::kInvalidArgument, "unique_responses of an empty corpus");
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& t : texts) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

std::vector<std::string> unique_responses(std::span<const harness::ResponseRecord> corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& r : corpus) texts.push_back(r.normalized);
  return unique_texts(texts);
}

void write_embedding_file(const std::filesystem::path& path, std::span<const std::string> texts,
                          const Matrix& vectors) {
  if (texts.size() != vectors.rows()) throw Error(ErrorKind::kInvalidArgument, "texts/vectors row mismatch");
  std::string out;
  out += kMagic;
  out += '\n';
  out += std::to_string(vectors.rows()) + ' ' + std::to_string(vectors.cols()) + '\n';
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    if (texts[i].find('\n') != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "embedding text may not contain a newline");
    }
    out += std::to_string(texts[i].size()) + ' ' + texts[i];
    for (const double v : vectors.row(i)) {
      out += ' ';
      out += format_double(v);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

EmbeddingFile read_embedding_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Cursor cur(text, path);
  if (cur.take_line() != kMagic) schema_error(path, 1, "missing 'stereotax-embeddings 1' header");
  const auto dims = split(cur.take_line(), ' ');
  if (dims.size() != 2) schema_error(path, 2, "expected '<n> <d>'");
  const std::size_t n = parse_size(dims[0], path, 2);
  const std::size_t d = parse_size(dims[1], path, 2);
  if (d == 0) schema_error(path, 2, "dimension must be positive");

  EmbeddingFile out;
  out.digest = sha256_hex(text);
  std::vector<double> data;
  data.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (cur.at_end()) schema_error(path, cur.line() + 1, "expected " + std::to_string(n) + " rows");
    std::string_view line = cur.take_line();
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos) schema_error(path, cur.line(), "missing text length prefix");
    const std::size_t len = parse_size(line.substr(0, sp), path, cur.line());
    if (sp + 1 + len > line.size()) schema_error(path, cur.line(), "text shorter than its length prefix");
    out.texts.emplace_back(line.substr(sp + 1, len));
    std::string_view rest = line.substr(sp + 1 + len);
    std::size_t count = 0;
    while (!rest.empty()) {
      if (rest.front() != ' ') schema_error(path, cur.line(), "expected a space before each value");
      rest.remove_prefix(1);
      const auto next = rest.find(' ');
      const auto tok = rest.substr(0, next);
      data.push_back(parse_double(tok, path, cur.line()));
      ++count;
      rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next);
    }
    if (count != d) {
      schema_error(path, cur.line(), "dimension mismatch: expected " + std::to_string(d) + " values, got " +
                                         std::to_string(count));
    }
  }
  out.vectors = Matrix(n, d, std::move(data));
  return out;
}

EmbeddingSource EmbeddingSource::file(std::filesystem::path path) {
  EmbeddingSource s;
  s.kind = Kind::kFile;
  s.location = path.string();
  return s;
}

EmbeddingSource EmbeddingSource::service(std::string base_url) {
  EmbeddingSource s;
  s.kind = Kind::kService;
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
  s.location = std::move(base_url);
  return s;
}

EmbeddingMatrix fetch_embeddings(std::span<const std::string> texts, const EmbeddingSource& source,
                                 const harness::HttpPost& post) {
  EmbeddingMatrix out;
  out.texts.assign(texts.begin(), texts.end());
  if (texts.empty()) throw Error(ErrorKind::kInvalidArgument, "no texts to embed");

  if (source.kind == EmbeddingSource::Kind::kFile) {
    auto file = read_embedding_file(source.location);
    std::unordered_map<std::string, std::size_t> where;
    for (std::size_t i = 0; i < file.texts.size(); ++i) where.emplace(file.texts[i], i);
    const std::size_t d = file.vectors.cols();
    Matrix m(texts.size(), d);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto it = where.find(texts[i]);
      if (it == where.end()) {
        throw Error(ErrorKind::kInvalidArgument, "embedding file '" + source.location + "' is missing text '" +
                                                     texts[i] + "'");
      }
      const auto src = file.vectors.row(it->second);
      std::copy(src.begin(), src.end(), m.row(i).begin());
    }
    out.vectors = std::move(m);
    out.source = "file:" + source.location;
    out.digest = file.digest;
  } else {
    std::vector<double> data;
    std::size_t d = 0;
    std::string model;
    for (std::size_t start = 0; start < texts.size(); start += source.batch_size) {
      const std::size_t end = std::min(texts.size(), start + source.batch_size);
      nlohmann::json body;
      body["texts"] = std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                               texts.begin() + static_cast<std::ptrdiff_t>(end));
      const auto res = post(source.location + "/embed", body.dump(), {}, source.timeout);
      if (res.status == 0) throw Error(ErrorKind::kTransport, "embedding service unreachable: " + res.error);
      if (res.status != 200) {
        throw Error(ErrorKind::kTransport, "embedding service returned HTTP " + std::to_string(res.status) + ": " +
                                               res.body.substr(0, 200));
      }
      const auto reply = nlohmann::json::parse(res.body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("vectors") || !reply["vectors"].is_array() ||
          !reply.contains("d")) {
        throw Error(ErrorKind::kMalformedReply, "embedding service reply lacks 'd' or 'vectors'");
      }
      const auto batch_d = reply["d"].get<std::size_t>();
      if (d == 0) d = batch_d;
      if (batch_d != d) throw Error(ErrorKind::kMalformedReply, "embedding dimension changed between batches");
      if (reply["vectors"].size() != end - start) {
        throw Error(ErrorKind::kMalformedReply, "embedding service returned the wrong number of vectors");
      }
      model = reply.value("model", "");
      for (const auto& v : reply["vectors"]) {
        if (!v.is_array() || v.size() != d) throw Error(ErrorKind::kMalformedReply, "dimension mismatch in reply");
        for (const auto& x : v) data.push_back(x.get<double>());
      }
    }
    out.vectors = Matrix(texts.size(), d, std::move(data));
    out.source = "service:" + source.location + (model.empty() ? "" : "#" + model);
    std::string canon;
    for (const double v : out.vectors.data()) canon += format_double(v) + ' ';
    out.digest = sha256_hex(canon);
  }
  normalize_rows(out.vectors, out.texts);
  return out;
}

}  // namespace stereotax::clustering
