#include "stereotax/elicitation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "stereotax/error.hpp"

namespace stereotax::harness {
namespace {

enum class ExchangeKind { kList, kValence };

struct Job {
  std::size_t term_index = 0;
  ExchangeKind kind = ExchangeKind::kList;
  PromptBundle bundle;
  std::string key;
  std::optional<std::string> reply;
};

}  // namespace

void absorb_list_reply(Corpus& corpus, const StimulusTerm& term, const std::string& reply,
                       const ParseOptions& options) {
  const auto parsed = parse_association_list(reply, options);
  for (const auto& d : parsed.dropped) corpus.parse_log.push_back({term.category, term.term, d.why, d.text});
  if (parsed.failure) {
    corpus.failures.push_back({term.category, term.term, *parsed.failure});
    return;
  }
  for (const auto& item : parsed.items) {
    corpus.records.push_back({term.category, term.term, item.order, item.raw, item.normalized});
  }
}

void mark_excluded_categories(Corpus& corpus, const StimulusSet& stimuli) {
  corpus.excluded_categories.clear();
  std::set<std::pair<std::string, std::string>> failed;
  for (const auto& f : corpus.failures) failed.emplace(f.category, f.term);
  for (const auto& category : stimuli.categories) {
    const auto terms = stimuli.terms_of(category);
    const bool all_failed = std::all_of(terms.begin(), terms.end(),
                                        [&](const std::string& t) { return failed.contains({category, t}); });
    if (!terms.empty() && all_failed) corpus.excluded_categories.push_back(category);
  }
}

Corpus run_elicitation(const StimulusSet& stimuli, const EndpointConfig& endpoint, ChatClient* client,
                       ExchangeCache& cache, const ElicitationOptions& options) {
  if (!client && !options.offline) {
    throw Error(ErrorKind::kConfig, "run_elicitation needs a client unless running offline");
  }
  const auto endpoint_id = endpoint.endpoint_id();

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < stimuli.terms.size(); ++i) {
    const auto& t = stimuli.terms[i];
    jobs.push_back({i, ExchangeKind::kList, build_list_prompt(t.term, endpoint.mode), {}, {}});
    if (options.collect_ratings) {
      jobs.push_back({i, ExchangeKind::kValence, build_valence_prompt(t.term, endpoint.mode), {}, {}});
    }
  }
  std::vector<std::size_t> pending;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    jobs[j].key = request_key(endpoint_id, build_request_body(endpoint, jobs[j].bundle));
    jobs[j].reply = cache.lookup(jobs[j].key);
    if (!jobs[j].reply) pending.push_back(j);
  }

  if (!pending.empty()) {
    if (options.offline) {
      const auto& t = stimuli.terms[jobs[pending.front()].term_index];
      throw Error(ErrorKind::kOfflineCacheMiss, std::to_string(pending.size()) +
                                                    " exchanges missing from cache in offline mode (first: term '" +
                                                    t.term + "')");
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
      while (!stop.load()) {
        const std::size_t slot = next.fetch_add(1);
        if (slot >= pending.size()) return;
        auto& job = jobs[pending[slot]];
        try {
          job.reply = client->complete(job.bundle).text;
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          stop.store(true);
        }
      }
    };
    const std::size_t n_threads = std::min(client->config().max_in_flight, pending.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    cache.flush();
    if (first_error) std::rethrow_exception(first_error);
  }

  Corpus corpus;
  for (const auto& job : jobs) {
    const auto& t = stimuli.terms[job.term_index];
    if (job.kind == ExchangeKind::kList) {
      absorb_list_reply(corpus, t, *job.reply, options.parse);
    } else {
      corpus.ratings.push_back({t.category, t.term, parse_valence_rating(*job.reply)});
    }
  }
  mark_excluded_categories(corpus, stimuli);
  return corpus;
}

}  // namespace stereotax::harness
