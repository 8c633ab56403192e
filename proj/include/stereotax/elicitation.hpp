#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stereotax/client.hpp"
#include "stereotax/harness.hpp"

namespace stereotax::harness {

struct ParseLogLine {
  std::string category;
  std::string term;
  std::string why;
  std::string text;

  bool operator==(const ParseLogLine&) const = default;
};

/// Everything one elicitation run produced, in stimulus order.
struct Corpus {
  std::vector<ResponseRecord> records;
  std::vector<ValenceRating> ratings;
  std::vector<CategoryFailure> failures;
  std::vector<std::string> excluded_categories;  // every term failed
  std::vector<ParseLogLine> parse_log;

  bool operator==(const Corpus&) const = default;
};

struct ElicitationOptions {
  ParseOptions parse;
  bool offline = false;        // cache misses become errors instead of requests
  bool collect_ratings = true;
};

/// One list exchange and one valence exchange per term, cache first. A
/// warm cache replays the run without network access. On a transport
/// failure in-flight work drains and the cache is flushed before the error
/// propagates. `client` may be null only when `options.offline` is set.
Corpus run_elicitation(const StimulusSet& stimuli, const EndpointConfig& endpoint, ChatClient* client,
                       ExchangeCache& cache, const ElicitationOptions& options = {});

/// Builds the per-term outcome from one raw list reply.
void absorb_list_reply(Corpus& corpus, const StimulusTerm& term, const std::string& reply,
                       const ParseOptions& options);

/// Marks categories whose every term produced a CategoryFailure.
void mark_excluded_categories(Corpus& corpus, const StimulusSet& stimuli);

std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const std::string& text);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus read_corpus(const std::filesystem::path& path);

}  // namespace stereotax::harness
