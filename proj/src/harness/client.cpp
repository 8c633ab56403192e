#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <thread>

#include "stereotax/client.hpp"
#include "stereotax/digest.hpp"
#include "stereotax/error.hpp"

namespace stereotax::harness {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /v1
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kConfig, "base_url '" + url + "' must start with http:// or https://");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? std::string() : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

bool transient(int status) { return status == 0 || status == 429 || status == 500 || status == 502 || status == 503 || status == 504; }

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds{0};
  const double scaled = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, attempt - 2);
  const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds{static_cast<long long>(capped)};
}

EndpointConfig EndpointConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "endpoint must be a JSON object");
  static const std::vector<std::string> known{"id", "base_url", "model", "mode", "api_key_env", "max_in_flight",
                                              "min_interval_ms", "timeout_s", "max_tokens", "retry"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw Error(ErrorKind::kConfig, "unknown endpoint key '" + k + "'");
    }
  }
  try {
    EndpointConfig c;
    c.id = get_or<std::string>(j, "id", "");
    c.base_url = get_or<std::string>(j, "base_url", "");
    c.model = get_or<std::string>(j, "model", "");
    c.mode = prompt_mode_from_string(get_or<std::string>(j, "mode", "chat"));
    c.api_key_env = get_or<std::string>(j, "api_key_env", c.api_key_env);
    c.max_in_flight = get_or<std::size_t>(j, "max_in_flight", c.max_in_flight);
    c.min_interval = std::chrono::milliseconds{get_or<long long>(j, "min_interval_ms", 0)};
    c.timeout = std::chrono::seconds{get_or<long long>(j, "timeout_s", 60)};
    if (j.contains("max_tokens")) c.max_tokens = j.at("max_tokens").get<int>();
    if (j.contains("retry")) {
      const auto& r = j.at("retry");
      c.retry.max_attempts = get_or<int>(r, "max_attempts", c.retry.max_attempts);
      c.retry.initial_backoff = std::chrono::milliseconds{get_or<long long>(r, "initial_backoff_ms", 500)};
      c.retry.max_backoff = std::chrono::milliseconds{get_or<long long>(r, "max_backoff_ms", 30000)};
      c.retry.multiplier = get_or<double>(r, "multiplier", 2.0);
    }
    if (c.max_in_flight == 0) throw Error(ErrorKind::kConfig, "endpoint.max_in_flight must be >= 1");
    if (c.retry.max_attempts < 1) throw Error(ErrorKind::kConfig, "endpoint.retry.max_attempts must be >= 1");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("endpoint: ") + e.what());
  }
}

void EndpointConfig::apply_env_overrides() {
  if (const char* v = std::getenv("STEREOTAX_ENDPOINT_BASE_URL")) base_url = v;
  if (const char* v = std::getenv("STEREOTAX_ENDPOINT_MODEL")) model = v;
  if (const char* v = std::getenv("STEREOTAX_ENDPOINT_MODE")) mode = prompt_mode_from_string(v);
  if (const char* v = std::getenv("STEREOTAX_ENDPOINT_ID")) id = v;
}

std::string EndpointConfig::endpoint_id() const { return id.empty() ? model + "@" + base_url : id; }

nlohmann::json build_request_body(const EndpointConfig& endpoint, const PromptBundle& bundle) {
  nlohmann::json body;
  body["model"] = endpoint.model;
  if (bundle.mode == PromptMode::kChat) {
    body["messages"] = nlohmann::json::array({
        {{"role", "system"}, {"content", bundle.system}},
        {{"role", "user"}, {"content", bundle.user}},
    });
  } else {
    body["prompt"] = bundle.user;
  }
  body["temperature"] = bundle.temperature;
  if (endpoint.max_tokens) body["max_tokens"] = *endpoint.max_tokens;
  return body;
}

std::string request_key(const std::string& endpoint_id, const nlohmann::json& body) {
  return sha256_hex(endpoint_id + '\n' + body.dump());
}

std::optional<std::string> extract_completion_text(const nlohmann::json& reply, PromptMode mode) {
  if (!reply.is_object() || !reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty()) {
    return std::nullopt;
  }
  const auto& choice = reply["choices"][0];
  if (!choice.is_object()) return std::nullopt;
  if (mode == PromptMode::kChat) {
    if (choice.contains("message") && choice["message"].is_object() && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
    return std::nullopt;
  }
  if (choice.contains("text") && choice["text"].is_string()) return choice["text"].get<std::string>();
  return std::nullopt;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::atoll(epoch));
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

HttpPost default_http_post() {
  return [](const std::string& url, const std::string& body, const std::map<std::string, std::string>& headers,
            std::chrono::seconds timeout) -> HttpResponse {
    const auto parts = split_url(url);
    httplib::Client cli(parts.origin);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = cli.Post(parts.path, h, body, "application/json");
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
  };
}

ChatClient::ChatClient(EndpointConfig config, ExchangeCache& cache, HttpPost post,
                       std::function<void(std::chrono::milliseconds)> sleep)
    : config_(std::move(config)), cache_(cache), post_(std::move(post)), sleep_(std::move(sleep)) {
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (config_.base_url.empty()) throw Error(ErrorKind::kConfig, "endpoint.base_url is required");
  if (config_.model.empty()) throw Error(ErrorKind::kConfig, "endpoint.model is required");
  split_url(config_.base_url);
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

std::uint64_t ChatClient::requests_sent() const noexcept {
  std::lock_guard lock(rate_mu_);
  return sent_;
}

void ChatClient::wait_for_slot() {
  std::chrono::steady_clock::time_point start;
  {
    std::lock_guard lock(rate_mu_);
    const auto now = std::chrono::steady_clock::now();
    start = std::max(now, next_start_);
    next_start_ = start + config_.min_interval;
    ++sent_;
  }
  const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(start - std::chrono::steady_clock::now());
  if (wait.count() > 0) sleep_(wait);
}

Completion ChatClient::complete(const PromptBundle& bundle) {
  const auto body = build_request_body(config_, bundle);
  const auto endpoint_id = config_.endpoint_id();
  CacheEntry entry;
  entry.key = request_key(endpoint_id, body);
  entry.endpoint_id = endpoint_id;
  entry.request = body;

  auto fail = [&](ErrorKind kind, const std::string& why) -> Error {
    entry.usable = false;
    entry.error = why;
    entry.timestamp = utc_timestamp();
    cache_.append(entry);
    return Error(kind, "endpoint " + endpoint_id + ": " + why);
  };

  if (!config_.api_key_env.empty() && api_key_.empty()) {
    throw fail(ErrorKind::kAuth, "API key environment variable " + config_.api_key_env + " is not set");
  }
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;

  const std::string url =
      config_.base_url + (bundle.mode == PromptMode::kChat ? "/chat/completions" : "/completions");
  const std::string payload = body.dump();
  HttpResponse res;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    if (const auto delay = config_.retry.backoff_before(attempt); delay.count() > 0) sleep_(delay);
    wait_for_slot();
    res = post_(url, payload, headers, config_.timeout);
    entry.attempts = attempt;
    entry.http_status = res.status;
    if (!transient(res.status)) break;
  }

  if (res.status == 401 || res.status == 403) {
    throw fail(ErrorKind::kAuth, "authentication rejected (HTTP " + std::to_string(res.status) + ")");
  }
  if (res.status == 429) {
    throw fail(ErrorKind::kRateLimit, "rate limited after " + std::to_string(entry.attempts) + " attempts");
  }
  if (res.status == 0) {
    throw fail(ErrorKind::kTransport, "connection failed after " + std::to_string(entry.attempts) +
                                          " attempts: " + res.error);
  }
  if (res.status < 200 || res.status >= 300) {
    entry.reply = nlohmann::json::parse(res.body, nullptr, false);
    if (entry.reply.is_discarded()) entry.reply = res.body;
    throw fail(ErrorKind::kTransport, "endpoint rejected request (HTTP " + std::to_string(res.status) + ")");
  }

  entry.reply = nlohmann::json::parse(res.body, nullptr, false);
  if (entry.reply.is_discarded()) {
    entry.reply = res.body;
    throw fail(ErrorKind::kMalformedReply, "reply is not JSON");
  }
  const auto text = extract_completion_text(entry.reply, bundle.mode);
  if (!text) throw fail(ErrorKind::kMalformedReply, "reply has no completion text");

  entry.text = *text;
  entry.usable = true;
  entry.timestamp = utc_timestamp();
  cache_.append(entry);
  return {*text, entry.key, entry.attempts, res.status, false};
}

}  // namespace stereotax::harness
