#include "stance/analysis.hpp"

#include <map>

#include "stance/errors.hpp"

namespace stance {

using nlohmann::json;

namespace {

json correlation_json(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    const auto c = correlate(x, y);
    return {{"r", c.r}, {"p", c.p_value}, {"n", c.n}};
  } catch (const StanceError& e) {
    return {{"r", nullptr}, {"p", nullptr}, {"n", x.size()}, {"error", e.what()}};
  }
}

}  // namespace

json analyze_rows(std::span<const EvalRow> rows, const AnalysisOptions& options) {
  if (rows.empty()) throw EmptyEvaluation();

  // Length vs correctness, over every row and over Good rows only.
  std::vector<double> len_all, ok_all, len_good, ok_good;
  std::vector<FeatureVector> features;
  std::vector<Outcome> outcomes;
  std::map<std::string, std::pair<double, std::size_t>> lengths;
  for (const auto& row : rows) {
    const bool correct = row.gold == row.pred;
    const bool good = row.validity == Validity::Good;
    len_all.push_back(static_cast<double>(row.word_count));
    ok_all.push_back(correct ? 1.0 : 0.0);
    if (good) {
      len_good.push_back(static_cast<double>(row.word_count));
      ok_good.push_back(correct ? 1.0 : 0.0);
    }
    features.push_back(FeatureVector::make(static_cast<double>(row.word_count),
                                           static_cast<double>(row.non_stance_word_count), good));
    outcomes.push_back(correct ? Outcome::Correct : Outcome::Incorrect);
    auto& [sum, count] = lengths[row.model];
    sum += static_cast<double>(row.word_count);
    ++count;
  }

  json correlation = correlation_json(len_all, ok_all);
  correlation["good_only"] = correlation_json(len_good, ok_good);

  json tree_doc{{"split_seed", options.split_seed},
                {"test_fraction", options.test_fraction},
                {"params", {{"max_depth", options.tree.max_depth}, {"min_samples_leaf", options.tree.min_samples_leaf}}},
                {"features", kFeatureNames}};
  const auto split = train_test_split(features.size(), options.test_fraction, options.split_seed);
  auto pick = [](const auto& v, const std::vector<std::size_t>& idx) {
    std::vector<typename std::decay_t<decltype(v)>::value_type> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
  };
  const auto X_train = pick(features, split.train);
  const auto y_train = pick(outcomes, split.train);
  const auto X_test = pick(features, split.test);
  const auto y_test = pick(outcomes, split.test);
  tree_doc["n_train"] = X_train.size();
  tree_doc["n_test"] = X_test.size();
  try {
    const auto tree = train_tree(X_train, y_train, options.tree);
    tree_doc["structure"] = tree.to_json();
    tree_doc["train_acc"] = tree_accuracy(tree, X_train, y_train);
    tree_doc["test_acc"] = X_test.empty() ? json(nullptr) : json(tree_accuracy(tree, X_test, y_test));
  } catch (const StanceError& e) {
    tree_doc["structure"] = nullptr;
    tree_doc["train_acc"] = nullptr;
    tree_doc["test_acc"] = nullptr;
    tree_doc["error"] = e.what();
  }

  json length_stats = json::object();
  for (const auto& [model, acc] : lengths) {
    length_stats[model] = {{"mean_word_count", acc.first / static_cast<double>(acc.second)}, {"rows", acc.second}};
  }

  return {{"rows", rows.size()},
          {"correlation", std::move(correlation)},
          {"tree", std::move(tree_doc)},
          {"length_stats", std::move(length_stats)}};
}

}  // namespace stance
