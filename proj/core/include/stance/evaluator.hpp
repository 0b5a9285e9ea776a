#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stance/labels.hpp"

namespace stance {

/// One scored (record, model, scheme) outcome; a line of results.jsonl.
struct EvalRow {
  std::string record_id;
  std::string dataset;
  std::string model;
  std::string scheme;
  CanonicalLabel gold = CanonicalLabel::Neutral;
  CanonicalLabel pred = CanonicalLabel::Neutral;
  Validity validity = Validity::Bad;
  std::size_t word_count = 0;
  std::size_t non_stance_word_count = 0;
  bool aborted = false;
  std::string config_hash;
  std::uint64_t seed = 0;

  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

nlohmann::json to_json(const EvalRow& row);
EvalRow eval_row_from_json(const nlohmann::json& doc);
std::vector<EvalRow> read_results(const std::filesystem::path& path);

struct LabelPair {
  CanonicalLabel gold;
  CanonicalLabel pred;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positive = 0;
  std::size_t gold_count = 0;
  std::size_t predicted_count = 0;
};

/// Per-class metrics over the fixed three-label set. A class with
/// TP+FP = 0 has precision 0, TP+FN = 0 recall 0, P+R = 0 F1 0.
std::array<ClassMetrics, 3> per_class_metrics(std::span<const LabelPair> pairs);

/// Unweighted mean of the three per-class F1 scores. Throws EmptyEvaluation.
double macro_f1(std::span<const LabelPair> pairs);

struct EvalReport {
  std::string dataset;
  std::string model;
  std::string scheme;
  double macro_f1_all = 0.0;
  std::optional<double> macro_f1_good;  // absent when no Good rows
  double valid_proportion = 0.0;
  std::array<ClassMetrics, 3> per_class{};
  std::size_t rows = 0;
  std::size_t good_rows = 0;
  std::size_t aborted_rows = 0;
};

/// Report over rows sharing one (dataset, model, scheme); the key is taken
/// from the first row. Throws EmptyEvaluation.
EvalReport build_report(std::span<const EvalRow> rows);

/// One report per (dataset, model, scheme), ordered by that key.
std::vector<EvalReport> build_reports(std::span<const EvalRow> rows);

nlohmann::json to_json(const EvalReport& report);

/// A dataset's model x scheme grid of macro_f1_all.
struct MatrixTable {
  std::string dataset;
  std::vector<std::string> models;   // sorted
  std::vector<std::string> schemes;  // canonical scheme order, unknown names last
  std::map<std::pair<std::string, std::string>, const EvalReport*> cells;

  /// Header "model,<schemes...>", one row per model, two-decimal cells,
  /// empty cell where the combination was not run.
  std::string to_csv() const;
  /// Same grid at full precision (null for missing cells) plus the
  /// valid-proportion and good-only grids.
  nlohmann::json to_json() const;
};

/// One table per dataset, ordered by dataset name. Pointers refer into
/// `reports`, which must outlive the tables.
std::vector<MatrixTable> build_matrices(std::span<const EvalReport> reports);

/// Writes matrix_<dataset>.csv and matrix_<dataset>.json into dir.
void emit_matrix(std::span<const EvalReport> reports, const std::filesystem::path& dir);

}  // namespace stance
