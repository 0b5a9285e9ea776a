#pragma once

#include <string>
#include <string_view>

namespace stance::text {

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s) noexcept;
bool is_space(char c) noexcept;
bool iequals(std::string_view a, std::string_view b) noexcept;
bool icontains(std::string_view haystack, std::string_view needle);

}  // namespace stance::text
