#include "stance/backend.hpp"

#include <cmath>
#include <thread>

#include "stance/errors.hpp"
#include "stance/hashing.hpp"
#include "stance/parallel.hpp"
#include "stance/text.hpp"

namespace stance {

using nlohmann::json;

std::string_view to_string(ApiStyle style) noexcept {
  return style == ApiStyle::Chat ? "chat" : "completion";
}

std::optional<ApiStyle> parse_api_style(std::string_view text) noexcept {
  if (text::iequals(text, "chat")) return ApiStyle::Chat;
  if (text::iequals(text, "completion")) return ApiStyle::Completion;
  return std::nullopt;
}

std::string_view to_string(BackendFailure::Kind kind) noexcept {
  switch (kind) {
    case BackendFailure::Kind::Unavailable: return "backend_unavailable";
    case BackendFailure::Kind::ContextLength: return "context_length_exceeded";
    case BackendFailure::Kind::Other: return "backend_error";
  }
  return "backend_error";
}

std::string cache_key(const BackendConfig& config, std::string_view prompt) {
  const json material = json::array(
      {config.endpoint_url, config.model_name, to_string(config.api_style), prompt, config.max_tokens});
  return sha256_hex(material.dump());
}

WireRequest make_wire_request(const BackendConfig& config, const RenderedPrompt& prompt) {
  WireRequest req;
  req.record_id = prompt.record_id;
  if (config.api_style == ApiStyle::Chat) {
    req.path = "/v1/chat/completions";
    req.body = {{"model", config.model_name},
                {"messages", json::array({{{"role", "user"}, {"content", prompt.text}}})},
                {"temperature", kGreedyTemperature},
                {"max_tokens", config.max_tokens}};
  } else {
    req.path = "/v1/completions";
    req.body = {{"model", config.model_name},
                {"prompt", prompt.text},
                {"temperature", kGreedyTemperature},
                {"max_tokens", config.max_tokens}};
  }
  return req;
}

std::string extract_completion_text(ApiStyle style, const json& response) {
  try {
    const auto& choice = response.at("choices").at(0);
    const auto& node = style == ApiStyle::Chat ? choice.at("message").at("content") : choice.at("text");
    if (node.is_null()) return {};
    return node.get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unrecognized completion response: ") + e.what());
  }
}

json make_wire_response(ApiStyle style, std::string_view text) {
  json choice = {{"index", 0}, {"finish_reason", "stop"}};
  if (style == ApiStyle::Chat) {
    choice["message"] = {{"role", "assistant"}, {"content", text}};
    return {{"object", "chat.completion"}, {"choices", json::array({choice})}};
  }
  choice["text"] = text;
  return {{"object", "text_completion"}, {"choices", json::array({choice})}};
}

HttpResponse Transport::post(const WireRequest& request) {
  sent_.fetch_add(1);
  return do_post(request);
}

// --- CompletionClient -------------------------------------------------------

namespace {

bool is_context_overflow(const HttpResponse& resp) {
  if (resp.status < 400 || resp.status >= 500) return false;
  return text::icontains(resp.body, "context_length") || text::icontains(resp.body, "context length");
}

bool is_retryable_status(int status) { return status >= 500 || status == 429 || status == 408; }

std::string snippet(std::string_view body) {
  constexpr std::size_t kMax = 200;
  return std::string(body.substr(0, kMax)) + (body.size() > kMax ? "..." : "");
}

}  // namespace

CompletionClient::CompletionClient(BackendConfig config, std::shared_ptr<Transport> transport,
                                   std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)), transport_(std::move(transport)), cache_(std::move(cache)) {
  if (!transport_) throw ConfigError("CompletionClient needs a transport");
  if (!cache_) cache_ = std::make_shared<ResponseCache>();
  if (config_.parallelism == 0) throw ConfigError("parallelism must be >= 1");
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

Completion CompletionClient::complete(const RenderedPrompt& prompt) {
  if (prompt.text.empty()) throw BackendError("refusing to send an empty prompt");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
        .count();
  };

  const std::string key = cache_key(config_, prompt.text);
  if (auto hit = cache_->get(key)) return {std::move(*hit), elapsed_ms(), true};

  std::promise<std::string> promise;
  {
    std::unique_lock lock(inflight_mutex_);
    // Re-check under the lock: a leader publishes to the cache before it
    // leaves the in-flight table.
    if (auto hit = cache_->get(key)) return {std::move(*hit), elapsed_ms(), true};
    if (auto it = inflight_.find(key); it != inflight_.end()) {
      auto shared = it->second;
      lock.unlock();
      return {shared.get(), elapsed_ms(), true};
    }
    inflight_.emplace(key, promise.get_future().share());
  }

  try {
    std::string text = fetch(prompt);
    cache_->put(key, prompt.text, text);
    promise.set_value(text);
    std::lock_guard lock(inflight_mutex_);
    inflight_.erase(key);
    return {std::move(text), elapsed_ms(), false};
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(inflight_mutex_);
    inflight_.erase(key);
    throw;
  }
}

std::string CompletionClient::fetch(const RenderedPrompt& prompt) {
  const WireRequest request = make_wire_request(config_, prompt);
  std::string last_error = "no attempt made";
  const int attempts = config_.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      const double scale = std::pow(config_.backoff_factor, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::duration<double, std::milli>(static_cast<double>(config_.backoff_base.count()) * scale)));
    }

    HttpResponse resp;
    try {
      resp = transport_->post(request);
    } catch (const BackendError& e) {
      last_error = e.what();
      continue;
    }

    if (resp.status >= 200 && resp.status < 300) {
      json doc;
      try {
        doc = json::parse(resp.body);
      } catch (const json::exception& e) {
        throw BackendError(std::string("completion response is not JSON: ") + e.what());
      }
      return extract_completion_text(config_.api_style, doc);
    }
    if (is_context_overflow(resp)) {
      throw ContextLengthExceeded("HTTP " + std::to_string(resp.status) + ": " + snippet(resp.body));
    }
    last_error = "HTTP " + std::to_string(resp.status) + ": " + snippet(resp.body);
    if (!is_retryable_status(resp.status)) throw BackendError(last_error);
  }
  throw BackendUnavailable("gave up after " + std::to_string(attempts) + " attempt(s): " + last_error);
}

std::vector<BatchResult> CompletionClient::run_batch(std::span<const RenderedPrompt> prompts) {
  std::vector<BatchResult> results(prompts.size());
  parallel_for_index(prompts.size(), config_.parallelism, [&](std::size_t i) {
    try {
      results[i] = complete(prompts[i]);
    } catch (...) {
      results[i] = classify_failure(std::current_exception());
    }
  });
  return results;
}

BackendFailure classify_failure(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ContextLengthExceeded& e) {
    return {BackendFailure::Kind::ContextLength, e.what()};
  } catch (const BackendUnavailable& e) {
    return {BackendFailure::Kind::Unavailable, e.what()};
  } catch (const std::exception& e) {
    return {BackendFailure::Kind::Other, e.what()};
  } catch (...) {
    return {BackendFailure::Kind::Other, "unknown error"};
  }
}

}  // namespace stance
