#include "stance/labels.hpp"

#include "stance/text.hpp"

namespace stance {

std::string_view to_string(CanonicalLabel label) noexcept {
  switch (label) {
    case CanonicalLabel::Agree: return "agree";
    case CanonicalLabel::Disagree: return "disagree";
    case CanonicalLabel::Neutral: return "neutral";
  }
  return "neutral";
}

std::optional<CanonicalLabel> parse_canonical(std::string_view text) noexcept {
  for (CanonicalLabel label : kCanonicalLabels) {
    if (text::iequals(text, to_string(label))) return label;
  }
  return std::nullopt;
}

std::string_view to_string(Validity v) noexcept { return v == Validity::Good ? "good" : "bad"; }

std::optional<Validity> parse_validity(std::string_view text) noexcept {
  if (text::iequals(text, "good")) return Validity::Good;
  if (text::iequals(text, "bad")) return Validity::Bad;
  return std::nullopt;
}

}  // namespace stance
