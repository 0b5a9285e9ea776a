#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace stance {

// --- correlation ------------------------------------------------------------

struct CorrelationResult {
  double r = 0.0;
  /// Two-sided Student-t p-value with n-2 degrees of freedom.
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Pearson correlation (point-biserial when y is 0/1). Requires n >= 3 and
/// non-constant x and y; throws LengthMismatch, DegenerateVariance.
CorrelationResult correlate(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with dof degrees of freedom.
double student_t_two_sided_p(double t, double dof);

// --- decision tree ----------------------------------------------------------

/// Output-shape features of one completion.
struct FeatureVector {
  static constexpr std::size_t kCount = 3;
  std::array<double, kCount> values{};  // raw_output_length, non_stance_word_count, has_valid_label

  static FeatureVector make(double raw_output_length, double non_stance_words, bool has_valid_label) {
    return FeatureVector{{raw_output_length, non_stance_words, has_valid_label ? 1.0 : 0.0}};
  }
  double operator[](std::size_t i) const noexcept { return values[i]; }
};

inline constexpr std::array<const char*, FeatureVector::kCount> kFeatureNames{
    "raw_output_length", "non_stance_word_count", "has_valid_label"};

enum class Outcome : unsigned char { Incorrect = 0, Correct = 1 };

struct TreeParams {
  std::size_t max_depth = 5;
  std::size_t min_samples_leaf = 1;
};

/// Gini impurity of a binary node with the given class counts.
double gini_impurity(std::size_t incorrect, std::size_t correct) noexcept;

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;       // samples with value <= threshold go left
  double weighted_gini = 0.0;   // size-weighted mean impurity of the children
};

/// Best (feature, midpoint threshold) over the given samples by weighted Gini,
/// ties to the lowest feature index then lowest threshold. Only splits leaving
/// at least min_samples_leaf on each side are considered. nullopt when none.
std::optional<SplitChoice> best_split(std::span<const FeatureVector> X, std::span<const Outcome> y,
                                      std::span<const std::size_t> indices,
                                      std::size_t min_samples_leaf);

/// Binary CART classifier over FeatureVector.
class DecisionTree {
 public:
  struct Node {
    // Internal when left/right are set.
    std::size_t feature = 0;
    double threshold = 0.0;
    std::optional<std::size_t> left;
    std::optional<std::size_t> right;
    std::array<std::size_t, 2> class_counts{};  // [incorrect, correct]
    Outcome prediction = Outcome::Incorrect;
    std::size_t depth = 0;

    bool is_leaf() const noexcept { return !left.has_value(); }
  };

  Outcome predict(const FeatureVector& fv) const;
  std::size_t depth() const noexcept;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const Node& root() const { return nodes_.front(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  nlohmann::json to_json() const;

 private:
  friend DecisionTree train_tree(std::span<const FeatureVector>, std::span<const Outcome>,
                                 const TreeParams&);
  std::vector<Node> nodes_;  // nodes_[0] is the root
};

/// Greedy CART. Stops on purity, max_depth, min_samples_leaf or when no split
/// strictly lowers weighted impurity. A leaf predicts the majority class,
/// Incorrect on a tie. Throws EmptyTrainingSet (fewer than 2 samples) and
/// LengthMismatch.
DecisionTree train_tree(std::span<const FeatureVector> X, std::span<const Outcome> y,
                        const TreeParams& params = {});

Outcome tree_predict(const DecisionTree& tree, const FeatureVector& fv);
double tree_accuracy(const DecisionTree& tree, std::span<const FeatureVector> X,
                     std::span<const Outcome> y);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then the last floor(n * test_fraction) indices (at least
/// one when n >= 2) form the test set. Both lists are sorted.
TrainTestSplit train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);

}  // namespace stance
