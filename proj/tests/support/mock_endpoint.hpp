#pragma once

// Scripted stand-in for an OpenAI-compatible endpoint, usable as an
// HttpPost. Replies are a pure function of the prompt text.

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereotax/client.hpp"
#include "stereotax/rng.hpp"

namespace mock {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words{
      "friendly", "Friendly", "unfriendly", "outgoing", "shy", "warm", "cold", "honest", "dishonest", "kind",
      "selfish", "greedy", "trustworthy", "smart", "intelligent", "lazy", "skilled", "analytical thinker",
      "Hard-working", "ambitious", "confident", "passive", "wealthy", "poor", "successful", "privileged",
      "religious", "conservative", "liberal", "tall", "beautiful", "fit", "black hair", "stylish", "happy",
      "angry", "emotional", "doctors", "teachers", "healthy", "sick", "disabled", "weird", "criminals",
      "rebellious", "normal", "foreign", "american", "urban", "minority", "immigrants", "family oriented",
      "traditional", "lucky", "creative", "artistic", "scientific", "numerous", "blue", "qzx", "loud",
      "quiet", "busy", "old", "young", "talkative", "punctual", "tired", "curious", "sporty"};
  return words;
}

struct Endpoint {
  std::shared_ptr<std::atomic<int>> calls = std::make_shared<std::atomic<int>>(0);

  static std::string prompt_of(const nlohmann::json& body) {
    if (body.contains("messages")) return body["messages"].back().value("content", "");
    return body.value("prompt", "");
  }

  static std::string target_of(const std::string& prompt) {
    for (const std::string cue : {"describe ", "people who are "}) {
      const auto at = prompt.find(cue);
      if (at == std::string::npos) continue;
      const auto from = at + cue.size();
      const auto to = prompt.find_first_of(".:?", from);
      const auto cut = prompt.find(" with a rating", from);
      return prompt.substr(from, std::min(to, cut) - from);
    }
    return prompt;
  }

  static std::string list_reply(const std::string& target) {
    if (target.find("blocked") != std::string::npos) {
      return "It is important to note that stereotypes can be harmful.\nI'm sorry, but I can't help with that.";
    }
    stereotax::Rng rng(fnv1a(target));
    const auto& words = vocabulary();
    const auto n = 20 + rng.below(25);
    std::string out = "Here are some characteristics:\n";
    for (std::uint64_t i = 0; i < n; ++i) {
      out += std::to_string(i + 1) + ". " + words[rng.below(words.size())] + "\n";
    }
    return out;
  }

  static std::string rating_reply(const std::string& target) {
    const auto r = 1 + fnv1a(target) % 5;
    return (fnv1a(target) & 8) ? "I would say " + std::to_string(r) + "." : std::to_string(r);
  }

  stereotax::harness::HttpResponse operator()(const std::string& url, const std::string& body,
                                              const std::map<std::string, std::string>&,
                                              std::chrono::seconds) const {
    ++*calls;
    const auto j = nlohmann::json::parse(body);
    const auto prompt = prompt_of(j);
    const auto target = target_of(prompt);
    const bool valence = prompt.find("Very negatively") != std::string::npos;
    const auto text = valence ? rating_reply(target) : list_reply(target);
    nlohmann::json reply;
    if (url.ends_with("/chat/completions")) {
      reply["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}});
    } else {
      reply["choices"] = nlohmann::json::array({{{"text", text}}});
    }
    return {200, reply.dump(), {}};
  }
};

inline stereotax::harness::HttpPost unreachable(std::shared_ptr<std::atomic<int>> calls = nullptr) {
  return [calls](const std::string&, const std::string&, const std::map<std::string, std::string>&,
                 std::chrono::seconds) {
    if (calls) ++*calls;
    return stereotax::harness::HttpResponse{0, {}, "connection refused"};
  };
}

}  // namespace mock
