#include "stance/backend.hpp"
#include "stance/errors.hpp"
#include "stance/hashing.hpp"

namespace stance {

using nlohmann::json;

MockTransport::MockTransport(ApiStyle style, const json& script, std::map<std::string, std::string> gold_words)
    : style_(style), gold_words_(std::move(gold_words)) {
  if (!script.is_object()) throw ConfigError("mock script must be a JSON object");
  if (auto it = script.find("map"); it != script.end()) {
    if (!it->is_object()) throw ConfigError("mock script: \"map\" must be an object");
    for (const auto& [hash, text] : it->items()) {
      if (!text.is_string()) throw ConfigError("mock script: map values must be strings");
      by_hash_.emplace(hash, text.get<std::string>());
    }
    if (auto d = script.find("default"); d != script.end()) {
      if (!d->is_string()) throw ConfigError("mock script: \"default\" must be a string");
      fallback_ = d->get<std::string>();
    }
  } else if (auto rule = script.find("rule"); rule != script.end()) {
    if (*rule != "echo_gold") throw ConfigError("mock script: unknown rule " + rule->dump());
    echo_gold_ = true;
  } else if (auto always = script.find("always"); always != script.end()) {
    if (!always->is_string()) throw ConfigError("mock script: \"always\" must be a string");
    always_ = always->get<std::string>();
  } else {
    throw ConfigError("mock script needs one of \"map\", \"rule\", \"always\"");
  }
}

HttpResponse MockTransport::do_post(const WireRequest& request) {
  auto not_found = [](const std::string& why) {
    return HttpResponse{404, json{{"error", {{"message", why}}}}.dump()};
  };

  std::string prompt;
  try {
    prompt = style_ == ApiStyle::Chat ? request.body.at("messages").at(0).at("content").get<std::string>()
                                      : request.body.at("prompt").get<std::string>();
  } catch (const json::exception& e) {
    return {400, json{{"error", {{"message", e.what()}}}}.dump()};
  }

  std::string text;
  if (always_) {
    text = *always_;
  } else if (echo_gold_) {
    const auto it = gold_words_.find(request.record_id);
    if (it == gold_words_.end()) return not_found("no gold label for record \"" + request.record_id + "\"");
    text = it->second;
  } else {
    const auto it = by_hash_.find(sha256_hex(prompt));
    if (it != by_hash_.end()) {
      text = it->second;
    } else if (fallback_) {
      text = *fallback_;
    } else {
      return not_found("no scripted completion for prompt " + sha256_hex(prompt));
    }
  }
  return {200, make_wire_response(style_, text).dump()};
}

}  // namespace stance
