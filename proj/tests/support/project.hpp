#pragma once

// Scratch project for end-to-end runs: a config, the shipped roster and
// mini lexicon, the scripted endpoint, and an embedding file built from the
// audited corpus.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mock_endpoint.hpp"
#include "stereotax/clustering.hpp"
#include "stereotax/elicitation.hpp"
#include "stereotax/report.hpp"

namespace e2e {

inline const std::filesystem::path kData = STEREOTAX_DATA_DIR;

struct Project {
  std::filesystem::path root;
  nlohmann::json config;
  mock::Endpoint endpoint;

  explicit Project(const std::string& name) : root(std::filesystem::temp_directory_path() / "stereotax_e2e" / name) {
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    config = {
        {"endpoint", {{"id", "mock"}, {"base_url", "http://mock.invalid/v1"}, {"model", "mock-model"},
                      {"api_key_env", ""}}},
        {"stimuli", (kData / "stimuli" / "roster_labels.tsv").string()},
        {"categories", (kData / "stimuli" / "categories_table6.txt").string()},
        {"registry", (kData / "registry.tsv").string()},
        {"lexicon", {(kData / "lexicon" / "mini_lexicon.tsv").string()}},
        {"embeddings", {{"file", "embeddings.txt"}}},
        {"cluster", {{"k_min", 2}, {"k_max", 5}, {"restarts", 3}, {"gap_references", 3}, {"top_n", 5}}},
        {"analysis", {{"permutations", 499}, {"bootstrap", 300}, {"trend_resamples", 300}}},
        {"seeds", {{"clustering", 7}, {"stats", 11}}},
        {"fixtures", {{"human_baseline", (kData / "fixtures" / "human_baseline.tsv").string()}}},
        {"output_dir", "out"},
        {"cache_dir", "cache"}};
  }

  std::filesystem::path config_path() const { return root / "stereotax.json"; }
  std::filesystem::path out() const { return root / config.value("output_dir", "out"); }

  void save() const { std::ofstream(config_path()) << config.dump(2); }

  stereotax::report::Context context() const {
    save();
    stereotax::report::Context ctx;
    ctx.config = stereotax::report::RunConfig::load(config_path());
    ctx.post = endpoint;
    ctx.sleep = [](std::chrono::milliseconds) {};
    return ctx;
  }

  // Deterministic toy vectors: three well separated groups keyed by a
  // hash of the text, plus small text-specific jitter.
  void write_embeddings_for_corpus() const {
    const auto corpus = stereotax::harness::read_corpus(out() / "corpus.json");
    const auto texts = stereotax::clustering::unique_responses(corpus.records);
    stereotax::clustering::Matrix m(texts.size(), 6);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto h = mock::fnv1a(texts[i]);
      stereotax::Rng rng(h);
      for (std::size_t j = 0; j < 6; ++j) m(i, j) = 0.05 * rng.normal();
      m(i, h % 3) += 1.0;
    }
    stereotax::clustering::write_embedding_file(root / "embeddings.txt", texts, m);
  }

  void run_all() {
    auto ctx = context();
    stereotax::report::cmd_audit(ctx);
    if (!std::filesystem::exists(root / "embeddings.txt")) write_embeddings_for_corpus();
    stereotax::report::cmd_code(ctx);
    stereotax::report::cmd_cluster(ctx);
    stereotax::report::cmd_analyze(ctx);
  }
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) files[e.path().filename().string()] = slurp(e.path());
  }
  return files;
}

inline int run_cli(const std::string& args) {
  const int status = std::system((std::string(STEREOTAX_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace e2e
