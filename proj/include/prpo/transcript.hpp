#ifndef PRPO_TRANSCRIPT_HPP
#define PRPO_TRANSCRIPT_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "prpo/label.hpp"

namespace prpo {

class Lexicon;

// One reasoning paragraph, or the final-answer paragraph.
struct Paragraph {
  std::size_t index = 0;
  std::string text;
  bool is_final = false;
};

// An ordered list of paragraphs; the last one is always the final-answer
// paragraph (marker-detected or last-paragraph fallback).
struct Transcript {
  std::vector<Paragraph> paragraphs;
  std::string raw;

  std::size_t reasoning_count() const { return paragraphs.size() - 1; }
  const Paragraph& final_paragraph() const { return paragraphs.back(); }
};

// True when the trimmed text begins with the case-insensitive
// final-answer marker.
bool starts_with_final_marker(std::string_view text);

// Split raw output into paragraphs at runs of blank lines. The first
// paragraph starting with the final-answer marker becomes the final
// paragraph and absorbs everything after it; without a marker the last
// paragraph is flagged final. Throws EmptyTranscript on whitespace-only
// input.
Transcript segment_transcript(std::string_view raw);

// Render a transcript back to text (paragraphs joined by blank lines).
std::string render_transcript(const Transcript& t);

// The transcript's verdict: a standalone real/fake token after the
// final paragraph's marker wins; otherwise the lexicon scorer decides.
Label extract_final_answer(const Transcript& t, const Lexicon& lex);

}  // namespace prpo

#endif
