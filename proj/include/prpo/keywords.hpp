#ifndef PRPO_KEYWORDS_HPP
#define PRPO_KEYWORDS_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "prpo/transcript.hpp"

namespace prpo {

// Up to k distinct stopword-filtered unigrams, ranked by term frequency
// (desc), first occurrence (asc), then lexicographically. Throws
// DomainError for k == 0; punctuation-only text yields an empty list.
std::vector<std::string> extract_keywords(std::string_view text, std::size_t k);

inline std::vector<std::string> extract_keywords(const Paragraph& p, std::size_t k) {
  return extract_keywords(p.text, k);
}

}  // namespace prpo

#endif
