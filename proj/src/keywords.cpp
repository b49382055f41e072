#include "prpo/keywords.hpp"

#include <algorithm>
#include <map>

#include "prpo/errors.hpp"
#include "prpo/text.hpp"

namespace prpo {

std::vector<std::string> extract_keywords(std::string_view text, std::size_t k) {
  if (k == 0) throw DomainError("extract_keywords: k must be >= 1");

  struct Entry {
    std::size_t tf = 0;
    std::size_t first_pos = 0;
  };
  std::map<std::string, Entry> counts;
  std::size_t pos = 0;
  for (auto& tok : tokenize(text)) {
    if (is_stopword(tok)) {
      ++pos;
      continue;
    }
    auto [it, inserted] = counts.try_emplace(std::move(tok), Entry{0, pos});
    ++it->second.tf;
    ++pos;
  }

  std::vector<std::pair<std::string, Entry>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.tf != b.second.tf) return a.second.tf > b.second.tf;
    if (a.second.first_pos != b.second.first_pos) return a.second.first_pos < b.second.first_pos;
    return a.first < b.first;
  });

  std::vector<std::string> out;
  out.reserve(std::min(k, ranked.size()));
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

}  // namespace prpo
