#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fedqa::text {

/// Lowercases and splits on every run of non-alphanumeric code points.
///
/// Input is decoded as UTF-8 (invalid bytes are treated as separators).
/// Case folding uses the simple one-to-one mappings for Latin-1, Latin
/// Extended-A, Greek and Cyrillic; other scripts pass through unchanged.
/// No stemming and no stopword removal.
std::vector<std::string> tokenize(std::string_view input);

/// Unicode-aware lowercase with the same coverage as tokenize().
std::string to_lower(std::string_view input);

std::string_view trim(std::string_view input) noexcept;

/// Trims and replaces every internal whitespace run with one space.
std::string collapse_whitespace(std::string_view input);

/// Joins with a separator; an empty range yields "".
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_icase(std::string_view haystack, std::string_view prefix);

/// Case-insensitive substring test (Unicode lowercase on both sides).
bool contains_icase(std::string_view haystack, std::string_view needle);

/// Decodes UTF-8; invalid bytes become U+FFFD.
std::u32string to_code_points(std::string_view input);

/// Number of UTF-8 code points; invalid bytes count as one each.
std::size_t utf8_length(std::string_view input) noexcept;

/// Longest prefix holding at most `count` code points.
std::string_view utf8_prefix(std::string_view input, std::size_t count) noexcept;

}  // namespace fedqa::text
