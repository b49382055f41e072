#include "prpo/text.hpp"

#include <array>
#include <cctype>

namespace prpo {

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (c < 128 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

namespace {

// Function words only; domain vocabulary must never appear here.
const std::array<std::string_view, 88> kStopwords = {
    "a",     "an",    "the",   "is",   "are",  "was",  "were", "be",    "been",  "being",
    "am",    "do",    "does",  "did",  "have", "has",  "had",  "will",  "would", "could",
    "should","may",   "might", "can",  "shall","must", "and",  "or",    "but",   "nor",
    "not",   "no",    "so",    "yet",  "for",  "of",   "in",   "to",    "with",  "at",
    "by",    "from",  "on",    "as",   "if",   "that", "this", "these", "those", "it",
    "its",   "he",    "she",   "they", "we",   "you",  "i",    "their", "his",   "her",
    "our",   "my",    "your",  "who",  "whom", "which","what", "where", "when",  "how",
    "all",   "each",  "every", "both", "few",  "more", "most", "other", "some",  "such",
    "than",  "too",   "very",  "there","here", "into", "over", "under"};

}  // namespace

bool is_stopword(const std::string& lowercase_token) {
  for (auto w : kStopwords) {
    if (w == lowercase_token) return true;
  }
  return false;
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace prpo
