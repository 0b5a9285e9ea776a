#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stance/labels.hpp"

namespace stance {

/// Keyword lists per canonical label, matched against whole normalized tokens.
class StanceVocab {
 public:
  /// for/supports/support/agree/favor; against/denies/deny/disagree/oppose;
  /// neutral/unrelated/none/comment.
  static StanceVocab defaults();
  /// {"agree": [...], "disagree": [...], "neutral": [...]}; throws ConfigError
  /// if lists overlap or a label is missing.
  static StanceVocab from_json(const nlohmann::json& doc);
  static StanceVocab load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<std::string>& keywords(CanonicalLabel label) const noexcept {
    return keywords_[index_of(label)];
  }
  /// Category of a normalized token, if it is a keyword.
  std::optional<CanonicalLabel> category_of(std::string_view token) const noexcept;
  /// Options not covered by any keyword list (empty means fully covered).
  std::vector<std::string> uncovered(std::span<const std::string> options) const;

 private:
  explicit StanceVocab(std::array<std::vector<std::string>, 3> keywords);
  std::array<std::vector<std::string>, 3> keywords_;
};

struct ParsedOutcome {
  CanonicalLabel label = CanonicalLabel::Neutral;
  Validity validity = Validity::Bad;
  std::vector<CanonicalLabel> matched_categories;  // ascending label order
  std::size_t word_count = 0;
  std::size_t non_stance_word_count = 0;
};

/// Whitespace-split, ASCII-lowercased tokens with leading/trailing ASCII
/// punctuation removed. A token that was all punctuation becomes "".
std::vector<std::string> normalized_tokens(std::string_view text);

std::size_t word_count(std::string_view text);
std::size_t non_stance_word_count(std::string_view text, const StanceVocab& vocab);

/// Exactly one matched category -> (that label, Good); otherwise
/// (Neutral, Bad). Total: never throws.
ParsedOutcome parse(std::string_view text, const StanceVocab& vocab);

}  // namespace stance
