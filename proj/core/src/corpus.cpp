#include "stance/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "stance/errors.hpp"
#include "stance/random.hpp"
#include "stance/text.hpp"

namespace stance {

namespace {

using nlohmann::json;

std::string required_string(const json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) {
    throw ConfigError(where + ": missing string field \"" + key + "\"");
  }
  return it->get<std::string>();
}

// Returns the trimmed, non-empty string field or throws MalformedRecord.
std::string record_field(const json& doc, const char* key, std::size_t line_no) {
  auto it = doc.find(key);
  if (it == doc.end()) throw MalformedRecord(line_no, std::string("missing field \"") + key + "\"");
  if (!it->is_string()) throw MalformedRecord(line_no, std::string("field \"") + key + "\" is not a string");
  std::string value = it->get<std::string>();
  if (text::trim(value).empty()) throw MalformedRecord(line_no, std::string("field \"") + key + "\" is empty");
  return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

}  // namespace

DatasetConfig parse_dataset_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("dataset config must be a JSON object");
  DatasetConfig config;
  config.name = required_string(doc, "name", "dataset config");
  config.target_kind = required_string(doc, "target_kind", "dataset config");
  if (text::trim(config.name).empty() || text::trim(config.target_kind).empty()) {
    throw ConfigError("dataset config: name and target_kind must be non-empty");
  }
  config.target_kind_plural = doc.contains("target_kind_plural")
                                  ? required_string(doc, "target_kind_plural", "dataset config")
                                  : config.target_kind + "s";

  const auto options = doc.find("stance_options");
  if (options == doc.end() || !options->is_array() || options->size() != 4) {
    throw ConfigError("dataset config: stance_options must list exactly 4 strings");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& opt = (*options)[i];
    if (!opt.is_string() || text::trim(opt.get<std::string>()).empty()) {
      throw ConfigError("dataset config: stance option " + std::to_string(i) + " is not a non-empty string");
    }
    config.stance_options[i] = opt.get<std::string>();
    if (!seen.insert(text::to_lower_ascii(config.stance_options[i])).second) {
      throw ConfigError("dataset config: duplicate stance option \"" + config.stance_options[i] + "\"");
    }
  }

  const auto map = doc.find("label_map");
  if (map == doc.end() || !map->is_object() || map->empty()) {
    throw ConfigError("dataset config: label_map must be a non-empty object");
  }
  for (const auto& [raw, canonical] : map->items()) {
    const auto label = canonical.is_string() ? parse_canonical(canonical.get<std::string>()) : std::nullopt;
    if (!label) throw ConfigError("dataset config: label_map[\"" + raw + "\"] is not agree/disagree/neutral");
    const std::string key = text::to_lower_ascii(text::trim(raw));
    auto [it, inserted] = config.label_map.emplace(key, *label);
    if (!inserted && it->second != *label) {
      throw ConfigError("dataset config: label_map maps \"" + key + "\" inconsistently");
    }
  }

  if (auto ex = doc.find("exemplar_file"); ex != doc.end() && !ex->is_null()) {
    if (!ex->is_string()) throw ConfigError("dataset config: exemplar_file must be a string");
    std::filesystem::path p = ex->get<std::string>();
    config.exemplar_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  return config;
}

DatasetConfig load_dataset_config(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_dataset_config(doc, path.parent_path());
}

json to_json(const DatasetConfig& config) {
  json map = json::object();
  for (const auto& [raw, label] : config.label_map) map[raw] = to_string(label);
  json doc{{"name", config.name},
           {"target_kind", config.target_kind},
           {"target_kind_plural", config.target_kind_plural},
           {"stance_options", config.stance_options},
           {"label_map", std::move(map)}};
  if (config.exemplar_file) doc["exemplar_file"] = config.exemplar_file->generic_string();
  return doc;
}

CanonicalLabel standardize_label(std::string_view raw, const LabelMap& map) {
  const auto it = map.find(text::to_lower_ascii(text::trim(raw)));
  if (it == map.end()) throw UnknownRawLabel(std::string(raw));
  return it->second;
}

std::vector<StanceRecord> read_dataset(std::istream& in, const DatasetConfig& config) {
  std::vector<StanceRecord> records;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
    if (!doc.is_object()) throw MalformedRecord(line_no, "not a JSON object");

    StanceRecord rec;
    rec.id = record_field(doc, "id", line_no);
    rec.statement = record_field(doc, "statement", line_no);
    rec.target = record_field(doc, "target", line_no);
    rec.raw_label = record_field(doc, "label", line_no);
    rec.canonical_gold = standardize_label(rec.raw_label, config.label_map);
    if (!ids.insert(rec.id).second) throw MalformedRecord(line_no, "duplicate id \"" + rec.id + "\"");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<StanceRecord> load_dataset(const std::filesystem::path& path, const DatasetConfig& config) {
  auto in = open_or_throw(path);
  return read_dataset(in, config);
}

void write_dataset(std::ostream& out, std::span<const StanceRecord> records) {
  for (const auto& r : records) {
    out << json{{"id", r.id}, {"statement", r.statement}, {"target", r.target}, {"label", r.raw_label}}.dump()
        << '\n';
  }
}

const std::string& gold_option_word(const StanceRecord& record, const DatasetConfig& config) {
  for (const auto& option : config.stance_options) {
    if (text::iequals(text::trim(record.raw_label), option)) return option;
  }
  return config.stance_options[index_of(record.canonical_gold)];
}

std::vector<Exemplar> read_exemplars(std::istream& in, const DatasetConfig& config) {
  std::vector<Exemplar> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
    if (!doc.is_object()) throw MalformedRecord(line_no, "not a JSON object");
    Exemplar ex{record_field(doc, "target", line_no), record_field(doc, "statement", line_no),
                record_field(doc, "stance_word", line_no)};
    if (std::find(config.stance_options.begin(), config.stance_options.end(), ex.stance_word) ==
        config.stance_options.end()) {
      throw MalformedRecord(line_no, "stance_word \"" + ex.stance_word + "\" is not a stance option of " +
                                         config.name);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Exemplar> load_exemplars(const std::filesystem::path& path, const DatasetConfig& config) {
  auto in = open_or_throw(path);
  return read_exemplars(in, config);
}

std::vector<Exemplar> select_exemplars(const DatasetConfig& config, std::size_t k, std::uint64_t seed,
                                       std::span<const StanceRecord> pool) {
  if (config.exemplar_file) {
    auto curated = load_exemplars(*config.exemplar_file, config);
    if (k == 0 || curated.size() < k) throw InsufficientExemplars(k, curated.size());
    curated.resize(k);
    return curated;
  }
  if (k == 0 || pool.size() < k) throw InsufficientExemplars(k, pool.size());
  SeededSampler sampler(seed);
  std::vector<Exemplar> out;
  out.reserve(k);
  for (std::size_t i : sampler.sample(pool.size(), k)) {
    const auto& rec = pool[i];
    out.push_back({rec.target, rec.statement, gold_option_word(rec, config)});
  }
  return out;
}

}  // namespace stance
