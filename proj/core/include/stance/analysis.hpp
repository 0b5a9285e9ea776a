#pragma once

#include <cstdint>
#include <span>

#include <nlohmann/json.hpp>

#include "stance/evaluator.hpp"
#include "stance/quality.hpp"

namespace stance {

struct AnalysisOptions {
  TreeParams tree;
  std::uint64_t split_seed = 0;
  double test_fraction = 0.2;
};

/// Output-quality analysis over scored rows:
///   correlation.{all,good}: length vs correctness (r, p, n) or an error
///   tree: structure, split_seed, train_acc, test_acc
///   length_stats: mean word_count per model
nlohmann::json analyze_rows(std::span<const EvalRow> rows, const AnalysisOptions& options);

}  // namespace stance
