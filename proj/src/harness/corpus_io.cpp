#include <json.hpp>

#include "stereotax/atomic_file.hpp"
#include "stereotax/digest.hpp"
#include "stereotax/elicitation.hpp"
#include "stereotax/error.hpp"

namespace stereotax::harness {

std::string corpus_to_json(const Corpus& corpus) {
  nlohmann::ordered_json j;
  j["format"] = "stereotax-corpus/1";
  auto& records = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : corpus.records) {
    records.push_back({{"category", r.category}, {"term", r.term}, {"order", r.order}, {"raw", r.raw},
                       {"normalized", r.normalized}});
  }
  auto& ratings = j["ratings"] = nlohmann::ordered_json::array();
  for (const auto& r : corpus.ratings) {
    nlohmann::ordered_json o{{"category", r.category}, {"term", r.term}};
    o["rating"] = r.rating ? nlohmann::ordered_json(*r.rating) : nlohmann::ordered_json(nullptr);
    ratings.push_back(std::move(o));
  }
  auto& failures = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : corpus.failures) {
    failures.push_back({{"category", f.category}, {"term", f.term}, {"reason", std::string(to_string(f.reason))}});
  }
  j["excluded_categories"] = corpus.excluded_categories;
  auto& log = j["parse_log"] = nlohmann::ordered_json::array();
  for (const auto& l : corpus.parse_log) {
    log.push_back({{"category", l.category}, {"term", l.term}, {"why", l.why}, {"text", l.text}});
  }
  return j.dump(1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

Corpus corpus_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "stereotax-corpus/1") throw Error(ErrorKind::kParse, "not a stereotax corpus file");
    Corpus c;
    for (const auto& r : j.at("records")) {
      c.records.push_back({r.at("category"), r.at("term"), r.at("order"), r.at("raw"), r.at("normalized")});
    }
    for (const auto& r : j.at("ratings")) {
      ValenceRating v{r.at("category"), r.at("term"), std::nullopt};
      if (!r.at("rating").is_null()) v.rating = r.at("rating").get<int>();
      c.ratings.push_back(std::move(v));
    }
    for (const auto& f : j.at("failures")) {
      c.failures.push_back({f.at("category"), f.at("term"), failure_reason_from_string(f.at("reason").get<std::string>())});
    }
    c.excluded_categories = j.at("excluded_categories").get<std::vector<std::string>>();
    if (j.contains("parse_log")) {
      for (const auto& l : j.at("parse_log")) c.parse_log.push_back({l.at("category"), l.at("term"), l.at("why"), l.at("text")});
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("corpus: ") + e.what());
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  write_file_atomic(path, corpus_to_json(corpus));
}

Corpus read_corpus(const std::filesystem::path& path) { return corpus_from_json(read_file(path)); }

}  // namespace stereotax::harness
