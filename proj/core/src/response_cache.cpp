#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "stance/backend.hpp"
#include "stance/errors.hpp"

namespace stance {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(*dir_, ec);
  if (ec) throw ConfigError("cannot create cache directory " + dir_->string() + ": " + ec.message());
}

std::filesystem::path ResponseCache::entry_path(const std::string& key) const {
  return *dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  if (!dir_) return std::nullopt;

  std::ifstream in(entry_path(key), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(in);
    auto text = doc.at("text").get<std::string>();
    memory_.emplace(key, text);
    return text;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // a torn or foreign file is a miss
  }
}

void ResponseCache::put(const std::string& key, std::string_view prompt, std::string_view text) {
  std::lock_guard lock(mutex_);
  memory_.insert_or_assign(key, std::string(text));
  if (!dir_) return;

  const auto path = entry_path(key);
  std::filesystem::create_directories(path.parent_path());
  std::ostringstream tmp_name;
  tmp_name << path.string() << ".tmp." << std::this_thread::get_id();
  {
    std::ofstream out(tmp_name.str(), std::ios::binary | std::ios::trunc);
    if (!out) throw BackendError("cannot write cache entry " + tmp_name.str());
    out << nlohmann::json{{"prompt", prompt}, {"text", text}, {"timestamp", utc_timestamp()}}.dump(2) << '\n';
  }
  std::filesystem::rename(tmp_name.str(), path);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return memory_.size();
}

}  // namespace stance
