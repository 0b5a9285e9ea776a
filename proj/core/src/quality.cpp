#include "stance/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stance/errors.hpp"
#include "stance/random.hpp"

namespace stance {

// --- correlation ------------------------------------------------------------

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("student t: degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

CorrelationResult correlate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  const std::size_t n = x.size();
  if (n < 3) throw DegenerateVariance("need at least 3 samples, got " + std::to_string(n));

  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateVariance();

  CorrelationResult out;
  out.n = n;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - out.r * out.r;
  out.p_value = one_minus_r2 <= 0.0 ? 0.0 : student_t_two_sided_p(out.r * std::sqrt(dof / one_minus_r2), dof);
  return out;
}

// --- decision tree ----------------------------------------------------------

double gini_impurity(std::size_t incorrect, std::size_t correct) noexcept {
  const std::size_t n = incorrect + correct;
  if (n == 0) return 0.0;
  const double p0 = static_cast<double>(incorrect) / static_cast<double>(n);
  const double p1 = static_cast<double>(correct) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

constexpr double kTieTolerance = 1e-12;

std::array<std::size_t, 2> count_classes(std::span<const Outcome> y, std::span<const std::size_t> indices) {
  std::array<std::size_t, 2> counts{};
  for (std::size_t i : indices) ++counts[static_cast<std::size_t>(y[i])];
  return counts;
}

}  // namespace

std::optional<SplitChoice> best_split(std::span<const FeatureVector> X, std::span<const Outcome> y,
                                      std::span<const std::size_t> indices, std::size_t min_samples_leaf) {
  const std::size_t n = indices.size();
  if (n < 2) return std::nullopt;
  min_samples_leaf = std::max<std::size_t>(min_samples_leaf, 1);
  const auto total = count_classes(y, indices);

  std::optional<SplitChoice> best;
  std::vector<std::size_t> order(indices.begin(), indices.end());
  for (std::size_t f = 0; f < FeatureVector::kCount; ++f) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return X[a][f] < X[b][f]; });
    std::array<std::size_t, 2> left{};
    // Sweep: after consuming order[0..j), a split sits between j-1 and j.
    for (std::size_t j = 1; j < n; ++j) {
      ++left[static_cast<std::size_t>(y[order[j - 1]])];
      const double lo = X[order[j - 1]][f];
      const double hi = X[order[j]][f];
      if (!(lo < hi)) continue;
      if (j < min_samples_leaf || n - j < min_samples_leaf) continue;

      const std::array<std::size_t, 2> right{total[0] - left[0], total[1] - left[1]};
      const double weighted = (static_cast<double>(j) * gini_impurity(left[0], left[1]) +
                               static_cast<double>(n - j) * gini_impurity(right[0], right[1])) /
                              static_cast<double>(n);
      if (!best || weighted < best->weighted_gini - kTieTolerance) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = SplitChoice{f, threshold, weighted};
      }
    }
  }
  return best;
}

namespace {

struct TreeBuilder {
  std::span<const FeatureVector> X;
  std::span<const Outcome> y;
  const TreeParams& params;
  std::vector<DecisionTree::Node>& nodes;

  std::size_t grow(std::vector<std::size_t> indices, std::size_t depth) {
    const std::size_t id = nodes.size();
    nodes.emplace_back();
    auto counts = count_classes(y, indices);
    {
      auto& node = nodes[id];
      node.class_counts = counts;
      node.depth = depth;
      node.prediction = counts[1] > counts[0] ? Outcome::Correct : Outcome::Incorrect;
    }

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const std::size_t min_leaf = std::max<std::size_t>(params.min_samples_leaf, 1);
    if (pure || depth >= params.max_depth || indices.size() < 2 * min_leaf) return id;

    const auto split = best_split(X, y, indices, min_leaf);
    if (!split || !(split->weighted_gini < gini_impurity(counts[0], counts[1]) - kTieTolerance)) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : indices) (X[i][split->feature] <= split->threshold ? left : right).push_back(i);
    indices.clear();
    indices.shrink_to_fit();

    const std::size_t l = grow(std::move(left), depth + 1);
    const std::size_t r = grow(std::move(right), depth + 1);
    auto& node = nodes[id];  // re-fetch: grow() may have reallocated
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

nlohmann::json node_to_json(const std::vector<DecisionTree::Node>& nodes, std::size_t id) {
  const auto& n = nodes[id];
  nlohmann::json doc{{"counts", {{"incorrect", n.class_counts[0]}, {"correct", n.class_counts[1]}}},
                     {"prediction", n.prediction == Outcome::Correct ? "correct" : "incorrect"}};
  if (n.is_leaf()) {
    doc["leaf"] = true;
    return doc;
  }
  doc["feature"] = kFeatureNames[n.feature];
  doc["threshold"] = n.threshold;
  doc["left"] = node_to_json(nodes, *n.left);
  doc["right"] = node_to_json(nodes, *n.right);
  return doc;
}

}  // namespace

DecisionTree train_tree(std::span<const FeatureVector> X, std::span<const Outcome> y, const TreeParams& params) {
  if (X.size() != y.size()) throw LengthMismatch(X.size(), y.size());
  if (X.size() < 2) throw EmptyTrainingSet();
  DecisionTree tree;
  std::vector<std::size_t> all(X.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  TreeBuilder{X, y, params, tree.nodes_}.grow(std::move(all), 0);
  return tree;
}

Outcome DecisionTree::predict(const FeatureVector& fv) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& n = nodes_[id];
    id = fv[n.feature] <= n.threshold ? *n.left : *n.right;
  }
  return nodes_[id].prediction;
}

std::size_t DecisionTree::depth() const noexcept {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

nlohmann::json DecisionTree::to_json() const { return node_to_json(nodes_, 0); }

Outcome tree_predict(const DecisionTree& tree, const FeatureVector& fv) { return tree.predict(fv); }

double tree_accuracy(const DecisionTree& tree, std::span<const FeatureVector> X, std::span<const Outcome> y) {
  if (X.size() != y.size()) throw LengthMismatch(X.size(), y.size());
  if (X.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < X.size(); ++i) hits += tree.predict(X[i]) == y[i];
  return static_cast<double>(hits) / static_cast<double>(X.size());
}

TrainTestSplit train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  TrainTestSplit split;
  if (n == 0) return split;
  auto perm = SeededSampler(seed).permutation(n);
  std::size_t test_count = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction));
  if (n >= 2) test_count = std::clamp<std::size_t>(test_count, 1, n - 1);
  else test_count = 0;
  split.train.assign(perm.begin(), perm.end() - static_cast<std::ptrdiff_t>(test_count));
  split.test.assign(perm.end() - static_cast<std::ptrdiff_t>(test_count), perm.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace stance
