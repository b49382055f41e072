#include <doctest.h>

#include "prpo/errors.hpp"
#include "prpo/lexicon.hpp"
#include "prpo/text.hpp"

using namespace prpo;

namespace {
const Lexicon& lex() {
  static const Lexicon instance = Lexicon::defaults();
  return instance;
}
}  // namespace

TEST_CASE("spec scoring examples") {
  auto s = score_text("The skin texture looks unnatural and overly smooth.", lex());
  CHECK(s.s_real == 0);
  CHECK(s.s_fake == 2);

  s = score_text("There is no inconsistent lighting; shadows look natural.", lex());
  CHECK(s.s_real == 2);
  CHECK(s.s_fake == 0);

  s = score_text("—", lex());  // em-dash only
  CHECK(s.s_real == 0);
  CHECK(s.s_fake == 0);
}

TEST_CASE("predict_label branches, tie goes to Real") {
  CHECK(predict_label({2, 0}) == Label::Real);
  CHECK(predict_label({0, 0}) == Label::Real);
  CHECK(predict_label({1, 3}) == Label::Fake);
  CHECK(predict_label({3, 3}) == Label::Real);
}

TEST_CASE("scoring is case-insensitive") {
  const char* text = "The Skin Texture LOOKS Unnatural And OVERLY SMOOTH.";
  auto s = score_text(text, lex());
  CHECK(s.s_fake == 2);
  auto s2 = score_text(to_lower(text), lex());
  CHECK(s2.s_fake == s.s_fake);
  CHECK(s2.s_real == s.s_real);
}

TEST_CASE("phrases beat sub-words and consume their span") {
  // 'overly smooth' counts once; 'smooth' alone is not a term
  auto s = score_text("overly smooth", lex());
  CHECK(s.s_fake == 1);
  CHECK(s.s_real == 0);

  // custom lexicon where the sub-word IS a term: the phrase must still win
  const Lexicon custom({"overly smooth", "smooth"}, {"fine"}, {"not"});
  auto s2 = score_text("the surface looks overly smooth", custom);
  CHECK(s2.s_fake == 1);
  auto s3 = score_text("the surface looks smooth", custom);
  CHECK(s3.s_fake == 1);
}

TEST_CASE("negation window is exactly 3 preceding tokens") {
  // distance 1..3: negated
  CHECK(score_text("not unnatural", lex()).s_real == 1);
  CHECK(score_text("not very unnatural", lex()).s_real == 1);
  CHECK(score_text("not at all unnatural", lex()).s_real == 1);
  // distance 4: out of scope
  auto s = score_text("not in any way unnatural", lex());
  CHECK(s.s_real == 0);
  CHECK(s.s_fake == 1);
}

TEST_CASE("multi-token negations negate from their end token") {
  // 'lack of' ends one token before 'genuine'
  auto s = score_text("a lack of genuine warmth", lex());
  CHECK(s.s_fake == 1);
  CHECK(s.s_real == 0);
  // 'none of' ends too far from the match
  s = score_text("none of the shadows look unnatural", lex());
  CHECK(s.s_fake == 1);
}

TEST_CASE("double negation still counts as negated") {
  auto s = score_text("no lack of genuine warmth", lex());
  CHECK(s.s_fake == 1);
  CHECK(s.s_real == 0);
}

TEST_CASE("word boundaries: 'unnatural' never matches 'natural'") {
  auto s = score_text("unnatural", lex());
  CHECK(s.s_fake == 1);
  CHECK(s.s_real == 0);
  s = score_text("supernatural", lex());
  CHECK(s.s_fake == 0);
  CHECK(s.s_real == 0);
}

TEST_CASE("adding a term never decreases its score outside negation scope") {
  const Lexicon base({"unnatural"}, {"natural"}, {"not"});
  const Lexicon extended({"unnatural", "blurry"}, {"natural"}, {"not"});
  const char* text = "the blurry photo looks unnatural";
  CHECK(score_text(text, extended).s_fake >= score_text(text, base).s_fake);
  CHECK(score_text(text, extended).s_fake == 2);
}

TEST_CASE("lexicon validation") {
  CHECK_THROWS_AS(Lexicon({"fake"}, {"fake"}, {"no"}), DataError);       // overlap
  CHECK_THROWS_AS(Lexicon({"Fake"}, {"real"}, {"no"}), DataError);       // not lowercase
  CHECK_THROWS_AS(Lexicon({""}, {"real"}, {"no"}), DataError);           // empty pattern
  CHECK_THROWS_AS(Lexicon({"fake"}, {"real"}, {"real"}), DataError);     // overlap with negation
}

TEST_CASE("lexicon loads from JSON") {
  const Lexicon l = Lexicon::from_json_text(
      R"({"fake": ["bogus"], "real": ["legit"], "negation": ["hardly"]})");
  CHECK(score_text("this looks bogus", l).s_fake == 1);
  CHECK(score_text("hardly bogus at all", l).s_real == 1);
  CHECK_THROWS_AS(Lexicon::from_json_text("{"), MalformedJson);
  CHECK_THROWS_AS(Lexicon::from_json_text(R"({"fake": []})"), SchemaViolation);
}
