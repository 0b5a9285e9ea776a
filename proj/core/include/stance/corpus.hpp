#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stance/labels.hpp"

namespace stance {

/// One labeled statement. Immutable once loaded.
struct StanceRecord {
  std::string id;
  std::string statement;
  std::string target;
  std::string raw_label;
  CanonicalLabel canonical_gold = CanonicalLabel::Neutral;

  friend bool operator==(const StanceRecord&, const StanceRecord&) = default;
};

/// Raw dataset label (lowercased) -> canonical class.
using LabelMap = std::map<std::string, CanonicalLabel>;

/// Per-dataset prompt vocabulary and label standardization.
///
/// stance_options are ordered for/supports, against/denies, neutral,
/// unrelated. The prompts quote them verbatim; evaluation never sees them.
struct DatasetConfig {
  std::string name;
  std::string target_kind;
  std::string target_kind_plural;
  std::array<std::string, 4> stance_options;
  LabelMap label_map;
  std::optional<std::filesystem::path> exemplar_file;
};

/// One few-shot demonstration.
struct Exemplar {
  std::string target;
  std::string statement;
  std::string stance_word;

  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

/// Parses a dataset config document. A relative exemplar_file is resolved
/// against base_dir.
DatasetConfig parse_dataset_config(const nlohmann::json& doc,
                                   const std::filesystem::path& base_dir = {});
DatasetConfig load_dataset_config(const std::filesystem::path& path);
nlohmann::json to_json(const DatasetConfig& config);

/// Throws UnknownRawLabel when raw (case-insensitive, trimmed) is not mapped.
CanonicalLabel standardize_label(std::string_view raw, const LabelMap& map);

/// Reads JSONL records {"id","statement","target","label"}; aborts on the
/// first bad line with MalformedRecord(line_no) or UnknownRawLabel.
std::vector<StanceRecord> read_dataset(std::istream& in, const DatasetConfig& config);
std::vector<StanceRecord> load_dataset(const std::filesystem::path& path,
                                       const DatasetConfig& config);
void write_dataset(std::ostream& out, std::span<const StanceRecord> records);

/// The prompt option word matching a record's gold label: the raw label
/// itself when it is one of the options, otherwise the option for its
/// canonical class (unrelated is never chosen for a non-"unrelated" raw label).
const std::string& gold_option_word(const StanceRecord& record, const DatasetConfig& config);

std::vector<Exemplar> read_exemplars(std::istream& in, const DatasetConfig& config);
std::vector<Exemplar> load_exemplars(const std::filesystem::path& path,
                                     const DatasetConfig& config);

/// Curated exemplar file (first k, file order) when the config names one,
/// otherwise a seed-deterministic sample of k records from pool.
std::vector<Exemplar> select_exemplars(const DatasetConfig& config, std::size_t k,
                                       std::uint64_t seed,
                                       std::span<const StanceRecord> pool = {});

}  // namespace stance
