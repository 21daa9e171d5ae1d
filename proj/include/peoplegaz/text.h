#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace peoplegaz {

// ASCII-only case folding. Non-ASCII bytes pass through untouched, which keeps
// UTF-8 sequences intact.
std::string to_lower(std::string_view s);

bool is_ascii_space(char c);
bool is_ascii_upper(char c);
bool has_digit(std::string_view s);

// True when the first character is an ASCII capital letter.
bool is_capitalized(std::string_view token);

// Upper-cases the first character of `word` when `like` starts with a capital.
std::string match_leading_case(std::string_view word, std::string_view like);

// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// Decodes (already valid) UTF-8 into code points.
std::u32string decode_utf8(std::string_view s);

// Joins `parts` with a single `sep`.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Splits on a single character, keeping empty fields.
std::vector<std::string> split(std::string_view s, char sep);

std::string trim(std::string_view s);

}  // namespace peoplegaz
