#include "stance/parser.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "stance/errors.hpp"
#include "stance/text.hpp"

namespace stance {

namespace {

bool is_ascii_punct(unsigned char c) noexcept {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

template <typename Fn>
void for_each_word(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text::is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !text::is_space(text[i])) ++i;
    if (i > start) fn(text.substr(start, i - start));
  }
}

std::string normalize_word(std::string_view word) {
  while (!word.empty() && is_ascii_punct(static_cast<unsigned char>(word.front()))) word.remove_prefix(1);
  while (!word.empty() && is_ascii_punct(static_cast<unsigned char>(word.back()))) word.remove_suffix(1);
  return text::to_lower_ascii(word);
}

}  // namespace

StanceVocab::StanceVocab(std::array<std::vector<std::string>, 3> keywords) : keywords_(std::move(keywords)) {
  std::set<std::string> seen;
  for (auto& list : keywords_) {
    for (auto& kw : list) {
      kw = normalize_word(kw);
      if (kw.empty()) throw ConfigError("stance vocab: empty keyword");
      if (!seen.insert(kw).second) throw ConfigError("stance vocab: keyword \"" + kw + "\" listed twice");
    }
    if (list.empty()) throw ConfigError("stance vocab: every label needs at least one keyword");
  }
}

StanceVocab StanceVocab::defaults() {
  return StanceVocab({{
      {"for", "supports", "support", "agree", "favor"},
      {"against", "denies", "deny", "disagree", "oppose"},
      {"neutral", "unrelated", "none", "comment"},
  }});
}

StanceVocab StanceVocab::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("stance vocab must be a JSON object");
  std::array<std::vector<std::string>, 3> lists;
  for (CanonicalLabel label : kCanonicalLabels) {
    const auto it = doc.find(std::string(to_string(label)));
    if (it == doc.end() || !it->is_array()) {
      throw ConfigError("stance vocab: missing keyword list for \"" + std::string(to_string(label)) + "\"");
    }
    try {
      lists[index_of(label)] = it->get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("stance vocab: ") + e.what());
    }
  }
  if (doc.size() != 3) throw ConfigError("stance vocab: only agree/disagree/neutral lists are allowed");
  return StanceVocab(std::move(lists));
}

StanceVocab StanceVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::json StanceVocab::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (CanonicalLabel label : kCanonicalLabels) doc[std::string(to_string(label))] = keywords(label);
  return doc;
}

std::optional<CanonicalLabel> StanceVocab::category_of(std::string_view token) const noexcept {
  if (token.empty()) return std::nullopt;
  for (CanonicalLabel label : kCanonicalLabels) {
    const auto& list = keywords_[index_of(label)];
    if (std::find(list.begin(), list.end(), token) != list.end()) return label;
  }
  return std::nullopt;
}

std::vector<std::string> StanceVocab::uncovered(std::span<const std::string> options) const {
  std::vector<std::string> missing;
  for (const auto& opt : options) {
    if (!category_of(normalize_word(opt))) missing.push_back(opt);
  }
  return missing;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  for_each_word(text, [&](std::string_view w) { tokens.push_back(normalize_word(w)); });
  return tokens;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  for_each_word(text, [&](std::string_view) { ++n; });
  return n;
}

std::size_t non_stance_word_count(std::string_view text, const StanceVocab& vocab) {
  return parse(text, vocab).non_stance_word_count;
}

ParsedOutcome parse(std::string_view text, const StanceVocab& vocab) {
  ParsedOutcome out;
  std::array<bool, 3> hit{};
  std::size_t stance_tokens = 0;
  for_each_word(text, [&](std::string_view w) {
    ++out.word_count;
    if (const auto category = vocab.category_of(normalize_word(w))) {
      hit[index_of(*category)] = true;
      ++stance_tokens;
    }
  });
  out.non_stance_word_count = out.word_count - stance_tokens;
  for (CanonicalLabel label : kCanonicalLabels) {
    if (hit[index_of(label)]) out.matched_categories.push_back(label);
  }
  if (out.matched_categories.size() == 1) {
    out.label = out.matched_categories.front();
    out.validity = Validity::Good;
  }
  return out;
}

}  // namespace stance
