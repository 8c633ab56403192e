#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>
#include <functional>
#include <chrono>
#include <ostream>

#include "stereotax/client.hpp"
#include "stereotax/clustering.hpp"
#include "stereotax/elicitation.hpp"
#include "stereotax/error.hpp"
#include "stereotax/lexicon.hpp"
#include "stereotax/stats.hpp"

namespace stereotax::report {

struct ClusterConfig {
  std::size_t k_min = 2;
  std::size_t k_max = 10;
  std::size_t restarts = 10;
  std::size_t gap_references = 20;
  std::size_t top_n = 5;
};

struct AnalysisConfig {
  std::size_t folds = 10;
  double alpha = 1.0;  // elastic-net mixing
  std::size_t permutations = 9999;
  std::size_t bootstrap = 2000;
  double letter_alpha = 0.05;
  std::size_t trend_resamples = 2000;
  std::size_t min_categories = 30;
};

struct Seeds {
  std::uint64_t clustering = 1;
  std::uint64_t stats = 1;
};

/// Run configuration (JSON). Relative paths resolve against the config
/// file's directory.
struct RunConfig {
  std::filesystem::path source;  // the config file itself
  harness::EndpointConfig endpoint;
  std::filesystem::path stimuli;
  std::optional<std::filesystem::path> categories;
  std::optional<std::filesystem::path> registry;
  std::vector<std::filesystem::path> lexicon;
  std::optional<clustering::EmbeddingSource> embeddings;
  ClusterConfig cluster;
  AnalysisConfig analysis;
  Seeds seeds;
  std::optional<std::filesystem::path> human_baseline;
  std::optional<std::filesystem::path> human_ratings;
  std::filesystem::path output_dir = "out";
  std::filesystem::path cache_dir = "cache";
  bool offline = false;
  bool collect_ratings = true;
  harness::ParseOptions parse;

  /// Collects every validation problem before throwing Error(kConfig).
  static RunConfig load(const std::filesystem::path& path);

  /// Digest over the settings that affect results (not paths to outputs).
  std::string digest() const;
};

struct RunManifest {
  std::string run_id;
  std::string config_digest;
  std::string stimuli_digest;
  std::string lexicon_digest;
  std::string endpoint_id;
  Seeds seeds;
  std::string toolkit_version;
  std::string created;
  std::map<std::string, std::string> excluded;   // category -> reason
  std::map<std::string, std::string> artifacts;  // file name -> sha256

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// Header line carried by every emitted table.
std::string provenance_line(const RunManifest& manifest);

/// Builds the manifest identity for a config; `lexicon_digest` may be empty
/// when the lexicon is not needed yet.
RunManifest make_manifest(const RunConfig& config, const std::string& lexicon_digest);

/// Loads out/manifest.json when present and checks that its identity
/// digests match `expected`; throws Error(kConfig) on mismatch.
RunManifest open_manifest(const std::filesystem::path& output_dir, const RunManifest& expected);

/// Recomputes an artifact's digest and compares it with the manifest.
void verify_artifact(const std::filesystem::path& output_dir, const RunManifest& manifest, const std::string& name);

void write_manifest(const std::filesystem::path& output_dir, const RunManifest& manifest);

/// Writes an artifact atomically and records its digest in the manifest.
void emit(const std::filesystem::path& output_dir, RunManifest& manifest, const std::string& name,
          const std::string& contents);

/// Wide codings table: one row per response, presence/direction/valence
/// columns per dimension.
std::string codings_to_tsv(std::span<const stats::CodedResponse> codings, const lexicon::DimensionRegistry& registry,
                           const std::string& provenance);
std::vector<stats::CodedResponse> codings_from_tsv(const std::filesystem::path& path,
                                                   const lexicon::DimensionRegistry& registry);

/// Column of published values for one metric: dimension -> value, keyed by
/// registry index.
using BaselineColumn = std::map<std::size_t, double>;

struct BaselineFixture {
  // metric -> column name (human, chatgpt, ...) -> values
  std::map<stats::Metric, std::map<std::string, BaselineColumn>> tables;
  std::vector<std::string> columns;
};

/// Fixture layout: `table dimension <column>...`, table in
/// {prevalence, direction, valence}.
BaselineFixture load_baseline(const std::filesystem::path& path, const lexicon::DimensionRegistry& registry);

/// Human category ratings: `category rating`.
std::map<std::string, double> load_category_ratings(const std::filesystem::path& path);

/// Pearson r between two baseline-style columns over shared dimensions.
double column_correlation(const BaselineColumn& a, const BaselineColumn& b);

/// Command context shared by the subcommands.
struct Context {
  RunConfig config;
  harness::HttpPost post = harness::default_http_post();
  std::function<void(std::chrono::milliseconds)> sleep;
  std::ostream* log = nullptr;
};

void cmd_audit(Context& ctx);
void cmd_code(Context& ctx);
void cmd_cluster(Context& ctx);
void cmd_analyze(Context& ctx);
void cmd_report_all(Context& ctx);

/// Documented process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitGeneric = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTransport = 3;
inline constexpr int kExitData = 4;
inline constexpr int kExitAnalysis = 5;

int exit_code_for(ErrorKind kind);

}  // namespace stereotax::report
