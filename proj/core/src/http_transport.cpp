#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include "stance/backend.hpp"
#include "stance/errors.hpp"

namespace stance {

HttpTransport::HttpTransport(BackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must look like http(s)://host[:port][/path]: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  base_ = url.substr(0, path_start);
  prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

HttpResponse HttpTransport::do_post(const WireRequest& request) {
  std::string path = request.path;
  // Accept endpoints given as ".../v1" as well as the bare server root.
  if (prefix_.ends_with("/v1") && path.starts_with("/v1/")) path = path.substr(3);
  path = prefix_ + path;

  httplib::Client client(base_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (const char* token = std::getenv(kApiKeyEnv); token != nullptr && *token != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  auto res = client.Post(path, headers, request.body.dump(), "application/json");
  if (!res) throw BackendError("request to " + base_ + path + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace stance
