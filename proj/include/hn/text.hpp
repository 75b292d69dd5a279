#pragma once

#include <string>
#include <string_view>

namespace hn {

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

/// Case-insensitive three-way compare (ASCII folding).
int icompare(std::string_view a, std::string_view b);

// UTF-8 helpers. Invalid sequences decode byte-wise as U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

bool valid_utf8(std::string_view s);

/// Glob match with `*`, `?` and `~` escape, case-insensitive.
bool wildcard_match(std::string_view pattern, std::string_view text);

}  // namespace hn
