#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <stance/corpus.hpp>
#include <stance/evaluator.hpp>
#include <stance/quality.hpp>

namespace stance::testing {

std::filesystem::path tests_dir();
std::filesystem::path configs_dir();
std::filesystem::path fixture(const std::string& dataset);
std::filesystem::path dataset_config_path(const std::string& dataset);

inline const std::vector<std::string> kFixtureDatasets{"covid-lies", "election2016", "phemerumors",
                                                       "semeval2016", "srq", "wtwt"};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Oracles. Deliberately written without reusing library code paths.

/// Macro-F1 from an explicit 3x3 confusion matrix, F1_c = 2TP / (2TP + FP + FN).
double oracle_macro_f1(std::span<const LabelPair> pairs);

/// Pearson r from raw sums in long double.
double oracle_pearson(std::span<const double> x, std::span<const double> y);

struct OracleSplit {
  std::size_t feature = 0;
  double left_max = 0.0;   // largest value going left
  double right_min = 0.0;  // smallest value going right
  double weighted_gini = 0.0;
};

/// Scores every (feature, cut between distinct values) partition directly.
std::optional<OracleSplit> oracle_best_split(std::span<const FeatureVector> X, std::span<const Outcome> y);

}  // namespace stance::testing
