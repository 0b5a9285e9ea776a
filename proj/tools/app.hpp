#pragma once

// Subcommand implementations behind the `stance` executable. Kept out of main
// so tests can drive them in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <stance/backend.hpp>
#include <stance/prompting.hpp>
#include <stance/quality.hpp>

namespace stance::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBackendUnavailable = 3;

struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path dataset_config;
  PromptScheme scheme = PromptScheme::TaskOnly;
  BackendConfig backend;
  std::optional<std::filesystem::path> mock_script;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> vocab;
  std::optional<std::filesystem::path> templates;
  std::size_t shots = 5;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string config_hash;
  std::size_t records = 0;
  std::size_t aborted = 0;
  std::uint64_t requests_sent = 0;
  std::string message;
};

/// Executes one (dataset, scheme, model) experiment and writes
/// <out>/transcripts.jsonl and <out>/results.jsonl.
RunOutcome cmd_run(const RunConfig& config);

/// Aggregates results files into <out>/report.json and matrix_<dataset>.{csv,json}.
int cmd_eval(const std::vector<std::filesystem::path>& results, const std::filesystem::path& out_dir,
             std::ostream& err);

struct AnalyzeConfig {
  std::vector<std::filesystem::path> results;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  TreeParams tree;
};

/// Writes <out>/analysis.json.
int cmd_analyze(const AnalyzeConfig& config, std::ostream& err);

struct ExportConfig {
  std::filesystem::path dataset;
  std::filesystem::path dataset_config;
  std::filesystem::path out;
  std::optional<std::filesystem::path> templates;
};

/// Context-Analyze prompts as JSONL, one per record, for adapter fine-tuning:
/// {"record_id","dataset","scheme","prompt","raw_label","target_word","canonical_gold"}.
int cmd_export_prompts(const ExportConfig& config, std::ostream& err);

}  // namespace stance::app
