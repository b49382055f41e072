#include "prpo/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "prpo/errors.hpp"
#include "prpo/lexicon.hpp"
#include "prpo/text.hpp"

namespace prpo {

namespace {

constexpr std::string_view kFinalMarker = "final answer";

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split_lines(std::string_view raw) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : raw) {
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  lines.push_back(std::move(cur));
  return lines;
}

}  // namespace

bool starts_with_final_marker(std::string_view text) {
  std::string t = to_lower(trim(text));
  return t.rfind(kFinalMarker, 0) == 0;
}

Transcript segment_transcript(std::string_view raw) {
  if (is_blank(raw)) throw EmptyTranscript();

  std::vector<std::string> blocks;
  std::string block;
  for (auto& line : split_lines(raw)) {
    if (is_blank(line)) {
      if (!block.empty()) blocks.push_back(trim(block));
      block.clear();
    } else {
      if (!block.empty()) block.push_back('\n');
      block += line;
    }
  }
  if (!block.empty()) blocks.push_back(trim(block));

  // Everything from the first marker paragraph onward collapses into one
  // final paragraph, so the final answer is always last.
  std::size_t marker = blocks.size();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (starts_with_final_marker(blocks[i])) {
      marker = i;
      break;
    }
  }
  if (marker < blocks.size()) {
    std::string merged = blocks[marker];
    for (std::size_t i = marker + 1; i < blocks.size(); ++i) {
      merged += "\n\n";
      merged += blocks[i];
    }
    blocks.resize(marker);
    blocks.push_back(std::move(merged));
  }

  Transcript t;
  t.raw.assign(raw.begin(), raw.end());
  t.paragraphs.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    t.paragraphs.push_back({i, std::move(blocks[i]), i + 1 == blocks.size()});
  }
  return t;
}

std::string render_transcript(const Transcript& t) {
  std::string out;
  for (std::size_t i = 0; i < t.paragraphs.size(); ++i) {
    if (i) out += "\n\n";
    out += t.paragraphs[i].text;
  }
  return out;
}

Label extract_final_answer(const Transcript& t, const Lexicon& lex) {
  const Paragraph& fin = t.final_paragraph();
  std::string lower = to_lower(fin.text);
  std::size_t pos = lower.find("final answer");
  if (pos != std::string::npos) {
    for (const auto& tok : tokenize(lower.substr(pos + 12))) {
      if (tok == "real") return Label::Real;
      if (tok == "fake") return Label::Fake;
    }
  }
  return predict_label(score_paragraph(fin, lex));
}

}  // namespace prpo
