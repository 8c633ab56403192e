#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"
#include "stereotax/report.hpp"

namespace stereotax::report {
namespace {

using nlohmann::json;

class Problems {
 public:
  void add(std::string what) { items_.push_back(std::move(what)); }
  bool empty() const { return items_.empty(); }
  [[noreturn]] void raise(const std::filesystem::path& path) const {
    std::string msg = "invalid config " + path.string() + ":";
    for (const auto& p : items_) msg += "\n  - " + p;
    throw Error(ErrorKind::kConfig, msg);
  }

 private:
  std::vector<std::string> items_;
};

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> known, Problems& problems) {
  if (!j.is_object()) {
    problems.add(std::string(where) + " must be an object");
    return;
  }
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      problems.add("unknown key '" + std::string(where) + "." + k + "'");
    }
  }
}

template <class T>
void read_into(const json& j, const char* key, T& out, std::string_view where, Problems& problems) {
  if (!j.is_object() || !j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    problems.add(std::string(where) + "." + key + " has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, "cannot read config " + path.string() + ": " + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  Problems problems;
  RunConfig c;
  c.source = path;
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  check_keys(j, "config",
             {"endpoint", "stimuli", "categories", "registry", "lexicon", "embeddings", "cluster", "analysis", "seeds",
              "fixtures", "output_dir", "cache_dir", "offline", "collect_ratings", "parse"},
             problems);
  if (!j.is_object()) problems.raise(path);

  if (j.contains("endpoint")) {
    try {
      c.endpoint = harness::EndpointConfig::from_json(j.at("endpoint"));
    } catch (const Error& e) {
      problems.add(e.what());
    }
  }
  c.endpoint.apply_env_overrides();

  std::string s;
  read_into(j, "stimuli", s, "config", problems);
  if (s.empty()) {
    problems.add("config.stimuli is required");
  } else {
    c.stimuli = resolve(base, s);
    if (!std::filesystem::exists(c.stimuli)) problems.add("stimuli file not found: " + c.stimuli.string());
  }
  if (j.contains("categories")) {
    std::string p;
    read_into(j, "categories", p, "config", problems);
    c.categories = resolve(base, p);
    if (!std::filesystem::exists(*c.categories)) problems.add("categories file not found: " + c.categories->string());
  }
  if (j.contains("registry")) {
    std::string p;
    read_into(j, "registry", p, "config", problems);
    c.registry = resolve(base, p);
    if (!std::filesystem::exists(*c.registry)) problems.add("registry file not found: " + c.registry->string());
  }
  std::vector<std::string> lex;
  read_into(j, "lexicon", lex, "config", problems);
  for (const auto& p : lex) {
    c.lexicon.push_back(resolve(base, p));
    if (!std::filesystem::exists(c.lexicon.back())) problems.add("lexicon file not found: " + c.lexicon.back().string());
  }

  if (j.contains("embeddings")) {
    const auto& e = j.at("embeddings");
    check_keys(e, "embeddings", {"file", "service", "batch_size", "timeout_s"}, problems);
    if (e.is_object()) {
      if (e.contains("file") == e.contains("service")) {
        problems.add("embeddings needs exactly one of 'file' or 'service'");
      } else if (e.contains("file")) {
        std::string p;
        read_into(e, "file", p, "embeddings", problems);
        c.embeddings = clustering::EmbeddingSource::file(resolve(base, p));
      } else {
        std::string url;
        read_into(e, "service", url, "embeddings", problems);
        c.embeddings = clustering::EmbeddingSource::service(url);
      }
      if (c.embeddings) {
        read_into(e, "batch_size", c.embeddings->batch_size, "embeddings", problems);
        long long timeout = c.embeddings->timeout.count();
        read_into(e, "timeout_s", timeout, "embeddings", problems);
        c.embeddings->timeout = std::chrono::seconds{timeout};
        if (c.embeddings->batch_size < 1 || c.embeddings->batch_size > 1024) {
          problems.add("embeddings.batch_size must lie in [1, 1024]");
        }
      }
    }
  }

  if (j.contains("cluster")) {
    const auto& k = j.at("cluster");
    check_keys(k, "cluster", {"k_min", "k_max", "restarts", "gap_references", "top_n"}, problems);
    read_into(k, "k_min", c.cluster.k_min, "cluster", problems);
    read_into(k, "k_max", c.cluster.k_max, "cluster", problems);
    read_into(k, "restarts", c.cluster.restarts, "cluster", problems);
    read_into(k, "gap_references", c.cluster.gap_references, "cluster", problems);
    read_into(k, "top_n", c.cluster.top_n, "cluster", problems);
  }
  if (c.cluster.k_min < 2 || c.cluster.k_max < c.cluster.k_min) problems.add("cluster range must satisfy 2 <= k_min <= k_max");
  if (c.cluster.restarts < 1) problems.add("cluster.restarts must be >= 1");
  if (c.cluster.top_n < 1) problems.add("cluster.top_n must be >= 1");

  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    check_keys(a, "analysis",
               {"folds", "alpha", "permutations", "bootstrap", "letter_alpha", "trend_resamples", "min_categories"},
               problems);
    read_into(a, "folds", c.analysis.folds, "analysis", problems);
    read_into(a, "alpha", c.analysis.alpha, "analysis", problems);
    read_into(a, "permutations", c.analysis.permutations, "analysis", problems);
    read_into(a, "bootstrap", c.analysis.bootstrap, "analysis", problems);
    read_into(a, "letter_alpha", c.analysis.letter_alpha, "analysis", problems);
    read_into(a, "trend_resamples", c.analysis.trend_resamples, "analysis", problems);
    read_into(a, "min_categories", c.analysis.min_categories, "analysis", problems);
  }
  if (c.analysis.folds < 3) problems.add("analysis.folds must be >= 3");
  if (!(c.analysis.alpha >= 0.0 && c.analysis.alpha <= 1.0)) problems.add("analysis.alpha must lie in [0, 1]");
  if (c.analysis.permutations < 1) problems.add("analysis.permutations must be >= 1");
  if (c.analysis.bootstrap < 2) problems.add("analysis.bootstrap must be >= 2");
  if (c.analysis.trend_resamples < 2) problems.add("analysis.trend_resamples must be >= 2");
  if (!(c.analysis.letter_alpha > 0.0 && c.analysis.letter_alpha < 1.0)) {
    problems.add("analysis.letter_alpha must lie in (0, 1)");
  }

  if (j.contains("seeds")) {
    const auto& sd = j.at("seeds");
    check_keys(sd, "seeds", {"clustering", "stats"}, problems);
    read_into(sd, "clustering", c.seeds.clustering, "seeds", problems);
    read_into(sd, "stats", c.seeds.stats, "seeds", problems);
  }
  if (j.contains("fixtures")) {
    const auto& f = j.at("fixtures");
    check_keys(f, "fixtures", {"human_baseline", "human_ratings"}, problems);
    if (f.is_object() && f.contains("human_baseline")) {
      std::string p;
      read_into(f, "human_baseline", p, "fixtures", problems);
      c.human_baseline = resolve(base, p);
      if (!std::filesystem::exists(*c.human_baseline)) problems.add("human baseline not found: " + c.human_baseline->string());
    }
    if (f.is_object() && f.contains("human_ratings")) {
      std::string p;
      read_into(f, "human_ratings", p, "fixtures", problems);
      c.human_ratings = resolve(base, p);
      if (!std::filesystem::exists(*c.human_ratings)) problems.add("human ratings not found: " + c.human_ratings->string());
    }
  }
  if (j.contains("parse")) {
    const auto& p = j.at("parse");
    check_keys(p, "parse", {"warning_patterns", "refusal_patterns", "unknown_term_patterns", "max_unnumbered_words"},
               problems);
    read_into(p, "warning_patterns", c.parse.warning_patterns, "parse", problems);
    read_into(p, "refusal_patterns", c.parse.refusal_patterns, "parse", problems);
    read_into(p, "unknown_term_patterns", c.parse.unknown_term_patterns, "parse", problems);
    read_into(p, "max_unnumbered_words", c.parse.max_unnumbered_words, "parse", problems);
  }
  std::string out = c.output_dir.string();
  read_into(j, "output_dir", out, "config", problems);
  c.output_dir = resolve(base, out);
  std::string cache = c.cache_dir.string();
  read_into(j, "cache_dir", cache, "config", problems);
  c.cache_dir = resolve(base, cache);
  read_into(j, "offline", c.offline, "config", problems);
  read_into(j, "collect_ratings", c.collect_ratings, "config", problems);

  if (!problems.empty()) problems.raise(path);
  return c;
}

std::string RunConfig::digest() const {
  nlohmann::ordered_json j;
  j["endpoint_id"] = endpoint.endpoint_id();
  j["mode"] = std::string(harness::to_string(endpoint.mode));
  j["cluster"] = {{"k_min", cluster.k_min}, {"k_max", cluster.k_max}, {"restarts", cluster.restarts},
                  {"gap_references", cluster.gap_references}, {"top_n", cluster.top_n}};
  j["analysis"] = {{"folds", analysis.folds},
                   {"alpha", analysis.alpha},
                   {"permutations", analysis.permutations},
                   {"bootstrap", analysis.bootstrap},
                   {"letter_alpha", analysis.letter_alpha},
                   {"trend_resamples", analysis.trend_resamples},
                   {"min_categories", analysis.min_categories}};
  j["parse"] = {{"warning_patterns", parse.warning_patterns},
                {"refusal_patterns", parse.refusal_patterns},
                {"unknown_term_patterns", parse.unknown_term_patterns},
                {"max_unnumbered_words", parse.max_unnumbered_words}};
  j["collect_ratings"] = collect_ratings;
  j["embeddings"] = embeddings ? (embeddings->kind == clustering::EmbeddingSource::Kind::kFile ? "file" : "service")
                               : "none";
  return sha256_hex(j.dump());
}

}  // namespace stereotax::report
