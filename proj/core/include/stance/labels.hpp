#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace stance {

/// The three-class label set every dataset is standardized onto.
enum class CanonicalLabel : unsigned char { Agree = 0, Disagree = 1, Neutral = 2 };

inline constexpr std::array<CanonicalLabel, 3> kCanonicalLabels{
    CanonicalLabel::Agree, CanonicalLabel::Disagree, CanonicalLabel::Neutral};

constexpr std::size_t index_of(CanonicalLabel label) noexcept {
  return static_cast<std::size_t>(label);
}

std::string_view to_string(CanonicalLabel label) noexcept;
/// Accepts "agree", "disagree", "neutral" in any ASCII case.
std::optional<CanonicalLabel> parse_canonical(std::string_view text) noexcept;

/// Whether a completion yielded exactly one stance category.
enum class Validity : unsigned char { Good, Bad };

std::string_view to_string(Validity v) noexcept;
std::optional<Validity> parse_validity(std::string_view text) noexcept;

}  // namespace stance
