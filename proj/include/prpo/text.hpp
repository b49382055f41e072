#ifndef PRPO_TEXT_HPP
#define PRPO_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace prpo {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Lowercase alphanumeric word tokens, in order of appearance.
// Non-ASCII bytes and punctuation act as separators.
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(const std::string& lowercase_token);

// FNV-1a, seedable. Stable across platforms; used wherever a
// reproducible hash is part of an output (feature hashing, mock keys).
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 14695981039346656037ull);

}  // namespace prpo

#endif
