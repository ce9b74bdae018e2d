#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace simgpt::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::size_t count_whitespace_tokens(std::string_view s);
bool is_valid_utf8(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// Lowercase, collapse internal whitespace, strip trailing punctuation.
// Used for every duplicate / equality check on generated sentences.
std::string normalize_sentence(std::string_view s);

// Shortest decimal form that round-trips to the same double.
std::string format_shortest(double value);

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace simgpt::text
