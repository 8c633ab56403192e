#include <sstream>

#include "stereotax/client.hpp"
#include "stereotax/error.hpp"

namespace stereotax::harness {

ExchangeCache::ExchangeCache(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      // A torn final line from an interrupted run is skipped, not fatal.
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("key")) {
        ++skipped_;
        continue;
      }
      if (j.value("usable", false) && j.contains("text") && j["text"].is_string()) {
        usable_.emplace(j["key"].get<std::string>(), j["text"].get<std::string>());
      }
    }
  }
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorKind::kIo, "cannot open cache '" + path_.string() + "' for appending");
}

std::optional<std::string> ExchangeCache::lookup(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = usable_.find(key);
  if (it == usable_.end()) return std::nullopt;
  return it->second;
}

void ExchangeCache::append(const CacheEntry& e) {
  nlohmann::ordered_json j;
  j["key"] = e.key;
  j["endpoint_id"] = e.endpoint_id;
  j["timestamp"] = e.timestamp;
  j["usable"] = e.usable;
  j["http_status"] = e.http_status;
  j["attempts"] = e.attempts;
  j["request"] = e.request;
  j["reply"] = e.reply;
  j["text"] = e.text;
  if (!e.error.empty()) j["error"] = e.error;
  const std::string line = j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  std::lock_guard lock(mu_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorKind::kIo, "write to cache '" + path_.string() + "' failed");
  if (e.usable) usable_.emplace(e.key, e.text);
}

void ExchangeCache::flush() {
  std::lock_guard lock(mu_);
  out_.flush();
}

std::size_t ExchangeCache::usable_entries() const {
  std::lock_guard lock(mu_);
  return usable_.size();
}

}  // namespace stereotax::harness
