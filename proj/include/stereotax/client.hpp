#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "stereotax/harness.hpp"

namespace stereotax::harness {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
  double multiplier = 2.0;

  /// Delay before attempt `attempt` (2-based; the first attempt has none).
  std::chrono::milliseconds backoff_before(int attempt) const;
};

/// OpenAI-compatible endpoint description.
struct EndpointConfig {
  std::string id;
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  PromptMode mode = PromptMode::kChat;
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds min_interval{0};  // between request starts
  std::chrono::seconds timeout{60};
  std::optional<int> max_tokens;
  RetryPolicy retry;

  /// Reads the `endpoint` object of a config file. Unknown keys are
  /// rejected so typos surface.
  static EndpointConfig from_json(const nlohmann::json& j);

  /// STEREOTAX_ENDPOINT_BASE_URL / _MODEL / _MODE / _ID override the file.
  void apply_env_overrides();

  /// Identifier stored in caches and manifests; defaults to model@base_url.
  std::string endpoint_id() const;
};

/// OpenAI-style JSON body for one prompt.
nlohmann::json build_request_body(const EndpointConfig& endpoint, const PromptBundle& bundle);

/// Cache key of a request: SHA-256 over endpoint id and the request body.
std::string request_key(const std::string& endpoint_id, const nlohmann::json& body);

struct CacheEntry {
  std::string key;
  std::string endpoint_id;
  nlohmann::json request;
  nlohmann::json reply;  // parsed endpoint JSON, or null
  std::string text;      // extracted completion text
  int http_status = 0;
  int attempts = 0;
  bool usable = false;
  std::string error;
  std::string timestamp;
};

/// Append-only JSONL log of every exchange. One writer serializes appends;
/// lookups see the first usable entry for a key.
class ExchangeCache {
 public:
  explicit ExchangeCache(std::filesystem::path path);

  const std::filesystem::path& path() const noexcept { return path_; }

  std::optional<std::string> lookup(const std::string& key) const;
  void append(const CacheEntry& entry);
  void flush();

  std::size_t usable_entries() const;
  std::size_t skipped_lines() const noexcept { return skipped_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::map<std::string, std::string> usable_;
  std::size_t skipped_ = 0;
};

struct Completion {
  std::string text;
  std::string key;
  int attempts = 0;
  int http_status = 0;
  bool from_cache = false;
};

/// Minimal HTTP transport so tests can inject faults; the default uses
/// cpp-httplib.
struct HttpResponse {
  int status = 0;  // 0 = connection failure
  std::string body;
  std::string error;
};

using HttpPost = std::function<HttpResponse(const std::string& url, const std::string& body,
                                            const std::map<std::string, std::string>& headers,
                                            std::chrono::seconds timeout)>;

HttpPost default_http_post();

/// Sends prompts to one endpoint with bounded retries and a start-rate
/// limiter. Every exchange, failed or not, is appended to the cache before
/// the result is surfaced.
class ChatClient {
 public:
  ChatClient(EndpointConfig config, ExchangeCache& cache, HttpPost post = default_http_post(),
             std::function<void(std::chrono::milliseconds)> sleep = {});

  const EndpointConfig& config() const noexcept { return config_; }

  /// Throws Error(kAuth), Error(kRateLimit), Error(kTransport) or
  /// Error(kMalformedReply).
  Completion complete(const PromptBundle& bundle);

  std::uint64_t requests_sent() const noexcept;

 private:
  void wait_for_slot();

  EndpointConfig config_;
  ExchangeCache& cache_;
  HttpPost post_;
  std::function<void(std::chrono::milliseconds)> sleep_;
  std::string api_key_;
  mutable std::mutex rate_mu_;
  std::chrono::steady_clock::time_point next_start_{};
  std::uint64_t sent_ = 0;
};

/// Extracts choices[0].message.content (chat) or choices[0].text.
std::optional<std::string> extract_completion_text(const nlohmann::json& reply, PromptMode mode);

std::string utc_timestamp();

}  // namespace stereotax::harness
