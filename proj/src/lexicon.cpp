#include "prpo/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "prpo/errors.hpp"
#include "prpo/text.hpp"

namespace prpo {

namespace {

void check_terms(const std::vector<std::string>& terms, const char* which) {
  for (const auto& t : terms) {
    if (t.empty()) throw DataError(std::string(which) + " lexicon contains an empty pattern");
    if (t != to_lower(t))
      throw DataError(std::string(which) + " lexicon pattern '" + t + "' is not lowercase");
  }
}

}  // namespace

Lexicon::Lexicon(std::vector<std::string> fake_terms,
                 std::vector<std::string> real_terms,
                 std::vector<std::string> negation_terms)
    : fake_(std::move(fake_terms)),
      real_(std::move(real_terms)),
      negation_(std::move(negation_terms)) {
  check_terms(fake_, "fake");
  check_terms(real_, "real");
  check_terms(negation_, "negation");

  std::set<std::string> seen;
  for (const auto* set : {&fake_, &real_, &negation_}) {
    for (const auto& t : *set) {
      if (!seen.insert(t).second)
        throw DataError("lexicon sets are not pairwise disjoint: '" + t + "'");
    }
  }

  for (const auto& t : fake_) term_patterns_.push_back({tokenize(t), true});
  for (const auto& t : real_) term_patterns_.push_back({tokenize(t), false});
  std::stable_sort(term_patterns_.begin(), term_patterns_.end(),
                   [](const Pattern& a, const Pattern& b) {
                     return a.tokens.size() > b.tokens.size();
                   });
  for (const auto& t : negation_) negation_patterns_.push_back(tokenize(t));
  std::stable_sort(negation_patterns_.begin(), negation_patterns_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

Lexicon Lexicon::defaults() {
  return Lexicon(
      {"unnatural", "inconsistent", "manipulated", "overly smooth", "artificial",
       "artifact", "artifacts", "distorted", "distortion", "mismatch", "irregular",
       "synthetic", "fake"},
      {"authentic", "genuine", "realistic", "natural", "consistent", "typical",
       "plausible", "normal", "real"},
      {"no", "not", "without", "lack of", "lacks", "absence of", "free of", "none of"});
}

Lexicon Lexicon::from_json_text(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedJson(std::string("lexicon: ") + e.what());
  }
  for (const char* key : {"fake", "real", "negation"}) {
    if (!j.contains(key) || !j[key].is_array())
      throw SchemaViolation(std::string("lexicon: missing array field '") + key + "'");
  }
  return Lexicon(j["fake"].get<std::vector<std::string>>(),
                 j["real"].get<std::vector<std::string>>(),
                 j["negation"].get<std::vector<std::string>>());
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open lexicon file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

namespace {

bool match_at(const std::vector<std::string>& tokens, std::size_t i,
              const std::vector<std::string>& pattern) {
  if (pattern.empty() || i + pattern.size() > tokens.size()) return false;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    if (tokens[i + k] != pattern[k]) return false;
  }
  return true;
}

}  // namespace

LabelScore score_text(std::string_view text, const Lexicon& lex) {
  const std::vector<std::string> tokens = tokenize(text);

  // Token indices where some negation occurrence ends.
  std::vector<bool> negation_end(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t len = 0;
    for (const auto& pat : lex.negation_patterns_) {
      if (match_at(tokens, i, pat)) {
        len = pat.size();
        break;
      }
    }
    if (len) {
      negation_end[i + len - 1] = true;
      i += len;
    } else {
      ++i;
    }
  }

  LabelScore score;
  for (std::size_t i = 0; i < tokens.size();) {
    const Lexicon::Pattern* hit = nullptr;
    for (const auto& pat : lex.term_patterns_) {
      if (match_at(tokens, i, pat.tokens)) {
        hit = &pat;
        break;
      }
    }
    if (!hit) {
      ++i;
      continue;
    }
    bool negated = false;
    for (std::size_t back = 1; back <= 3 && back <= i; ++back) {
      if (negation_end[i - back]) {
        negated = true;
        break;
      }
    }
    const bool counts_fake = hit->fake != negated;
    if (counts_fake)
      ++score.s_fake;
    else
      ++score.s_real;
    i += hit->tokens.size();
  }
  return score;
}

}  // namespace prpo
