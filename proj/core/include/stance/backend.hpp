#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stance/prompting.hpp"

namespace stance {

enum class ApiStyle : unsigned char { Chat, Completion };

std::string_view to_string(ApiStyle style) noexcept;
std::optional<ApiStyle> parse_api_style(std::string_view text) noexcept;

/// Decoding is always greedy (temperature 0 on the wire); there is no knob.
struct BackendConfig {
  std::string endpoint_url;
  std::string model_name;
  ApiStyle api_style = ApiStyle::Chat;
  int max_tokens = 256;
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  int max_retries = 3;
  std::size_t parallelism = 1;
  std::chrono::milliseconds backoff_base{std::chrono::seconds(1)};
  double backoff_factor = 2.0;
};

inline constexpr double kGreedyTemperature = 0.0;
/// Bearer token for hosted endpoints; the value is never logged.
inline constexpr const char* kApiKeyEnv = "STANCE_API_KEY";

struct Completion {
  std::string text;
  std::int64_t latency_ms = 0;
  bool from_cache = false;
};

/// Content hash over (endpoint, model, api style, prompt, max_tokens).
std::string cache_key(const BackendConfig& config, std::string_view prompt);

/// Request path and JSON body for the configured API style.
struct WireRequest {
  std::string path;
  nlohmann::json body;
  /// Caller-side metadata, never serialized. Lets scripted transports key on
  /// the record.
  std::string record_id;
};

WireRequest make_wire_request(const BackendConfig& config, const RenderedPrompt& prompt);
/// choices[0].message.content (chat) or choices[0].text (completion); a null
/// content yields "". Throws BackendError on an unrecognized shape.
std::string extract_completion_text(ApiStyle style, const nlohmann::json& response);

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Something that can carry a wire request to a model. Counts every request
/// it is asked to send.
class Transport {
 public:
  virtual ~Transport() = default;

  /// Throws BackendError on connection-level failure.
  HttpResponse post(const WireRequest& request);
  std::uint64_t requests_sent() const noexcept { return sent_.load(); }

 protected:
  virtual HttpResponse do_post(const WireRequest& request) = 0;

 private:
  std::atomic<std::uint64_t> sent_{0};
};

/// HTTP via cpp-httplib; honours STANCE_API_KEY.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(BackendConfig config);

 protected:
  HttpResponse do_post(const WireRequest& request) override;

 private:
  BackendConfig config_;
  std::string base_;    // scheme://host[:port]
  std::string prefix_;  // path prefix of endpoint_url, no trailing slash
};

/// Wraps a callable; used by tests and in-process fakes.
class CallbackTransport final : public Transport {
 public:
  using Handler = std::function<HttpResponse(const WireRequest&)>;
  explicit CallbackTransport(Handler handler) : handler_(std::move(handler)) {}

 protected:
  HttpResponse do_post(const WireRequest& request) override { return handler_(request); }

 private:
  Handler handler_;
};

/// Scripted model answering over the real wire format. Script forms:
///   {"map": {"<sha256 of prompt>": "text", ...}, "default"?: "text"}
///   {"rule": "echo_gold"}          gold option word per record id
///   {"always": "word"}
class MockTransport final : public Transport {
 public:
  MockTransport(ApiStyle style, const nlohmann::json& script,
                std::map<std::string, std::string> gold_words = {});

 protected:
  HttpResponse do_post(const WireRequest& request) override;

 private:
  ApiStyle style_;
  std::map<std::string, std::string> by_hash_;
  std::optional<std::string> fallback_;
  std::optional<std::string> always_;
  bool echo_gold_ = false;
  std::map<std::string, std::string> gold_words_;
};

/// Builds the JSON body a chat/completion server would return for text.
nlohmann::json make_wire_response(ApiStyle style, std::string_view text);

/// Completion store keyed by cache_key(): an in-memory map, optionally
/// persisted as <dir>/<key[0:2]>/<key>.json = {"prompt","text","timestamp"}.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, std::string_view prompt, std::string_view text);
  std::size_t size() const;

 private:
  std::filesystem::path entry_path(const std::string& key) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> memory_;
};

/// How a batch item failed.
struct BackendFailure {
  enum class Kind : unsigned char { Unavailable, ContextLength, Other };
  Kind kind = Kind::Other;
  std::string message;
};

std::string_view to_string(BackendFailure::Kind kind) noexcept;

using BatchResult = std::variant<Completion, BackendFailure>;

/// Greedy completion client: cache lookup, single-flight for identical
/// in-flight keys, retries with exponential backoff.
class CompletionClient {
 public:
  CompletionClient(BackendConfig config, std::shared_ptr<Transport> transport,
                   std::shared_ptr<ResponseCache> cache = std::make_shared<ResponseCache>());

  /// Throws BackendUnavailable, ContextLengthExceeded or BackendError.
  Completion complete(const RenderedPrompt& prompt);

  /// Positionally aligned results; at most config().parallelism requests in
  /// flight. Never throws for a single item's failure.
  std::vector<BatchResult> run_batch(std::span<const RenderedPrompt> prompts);

  const BackendConfig& config() const noexcept { return config_; }
  const Transport& transport() const noexcept { return *transport_; }

 private:
  std::string fetch(const RenderedPrompt& prompt);

  BackendConfig config_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<ResponseCache> cache_;
  std::mutex inflight_mutex_;
  std::map<std::string, std::shared_future<std::string>> inflight_;
};

/// Maps a caught backend exception to a BackendFailure.
BackendFailure classify_failure(std::exception_ptr error);

}  // namespace stance
