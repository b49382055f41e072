#ifndef PRPO_LEXICON_HPP
#define PRPO_LEXICON_HPP

#include <string>
#include <string_view>
#include <vector>

#include "prpo/label.hpp"
#include "prpo/transcript.hpp"

namespace prpo {

struct LabelScore {
  int s_real = 0;
  int s_fake = 0;
};

// The three term dictionaries driving paragraph label prediction.
// Patterns are lowercase words or multi-word phrases matched on word
// boundaries; the three sets must be pairwise disjoint.
class Lexicon {
 public:
  Lexicon(std::vector<std::string> fake_terms,
          std::vector<std::string> real_terms,
          std::vector<std::string> negation_terms);

  static Lexicon defaults();
  static Lexicon from_json_text(std::string_view json_text);
  static Lexicon load(const std::string& path);

  const std::vector<std::string>& fake_terms() const { return fake_; }
  const std::vector<std::string>& real_terms() const { return real_; }
  const std::vector<std::string>& negation_terms() const { return negation_; }

 private:
  std::vector<std::string> fake_;
  std::vector<std::string> real_;
  std::vector<std::string> negation_;

  // Tokenized patterns, longest first, prepared once at construction.
  struct Pattern {
    std::vector<std::string> tokens;
    bool fake = false;
  };
  std::vector<Pattern> term_patterns_;
  std::vector<std::vector<std::string>> negation_patterns_;

  friend LabelScore score_text(std::string_view text, const Lexicon& lex);
};

// Counts real/fake term matches in the text. A match whose preceding
// 3-token window contains the end of a negation occurrence counts for
// the opposite side. Longer phrases win over their sub-words and
// consume their span.
LabelScore score_text(std::string_view text, const Lexicon& lex);

inline LabelScore score_paragraph(const Paragraph& p, const Lexicon& lex) {
  return score_text(p.text, lex);
}

// Real wins ties.
inline Label predict_label(const LabelScore& s) {
  return s.s_real >= s.s_fake ? Label::Real : Label::Fake;
}

}  // namespace prpo

#endif
