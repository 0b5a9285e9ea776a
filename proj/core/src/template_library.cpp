#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stance/errors.hpp"
#include "stance/prompting.hpp"

namespace stance {

namespace detail {
const std::map<std::string, std::string_view>& embedded_template_files();
}  // namespace detail

namespace {

std::string strip_final_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') throw ConfigError("template files must use LF line endings");
  return s;
}

}  // namespace

template <typename ReadFile>
TemplateLibrary TemplateLibrary::from_manifest(std::string_view manifest_text, ReadFile&& read) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("template manifest: ") + e.what());
  }

  TemplateLibrary lib;
  for (PromptScheme scheme : kAllSchemes) {
    const std::string name(scheme_name(scheme));
    const auto entry = manifest.find(name);
    if (entry == manifest.end() || !entry->is_array()) {
      throw ConfigError("template manifest: no stage list for " + name);
    }
    auto& stages = lib.schemes_[scheme];
    for (const auto& s : *entry) {
      try {
        StageAsset asset;
        asset.source = strip_final_newline(read(name + "/" + s.at("file").get<std::string>()));
        asset.produces = s.at("produces").get<std::string>();
        asset.consumes = s.at("consumes").get<std::vector<std::string>>();
        stages.push_back(std::move(asset));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("template manifest (" + name + "): " + e.what());
      }
    }
  }
  return lib;
}

const TemplateLibrary& TemplateLibrary::builtin() {
  static const TemplateLibrary lib = [] {
    const auto& files = detail::embedded_template_files();
    auto read = [&](const std::string& rel) -> std::string {
      const auto it = files.find(rel);
      if (it == files.end()) throw ConfigError("embedded template missing: " + rel);
      return std::string(it->second);
    };
    return from_manifest(read("manifest.json"), read);
  }();
  return lib;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& dir) {
  auto read = [&](const std::string& rel) -> std::string {
    std::ifstream in(dir / rel, std::ios::binary);
    if (!in) throw ConfigError("cannot read template " + (dir / rel).string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  return from_manifest(read("manifest.json"), read);
}

const std::vector<TemplateLibrary::StageAsset>& TemplateLibrary::stages(PromptScheme scheme) const {
  return schemes_.at(scheme);
}

}  // namespace stance
