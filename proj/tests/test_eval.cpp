#include <doctest.h>

#include <random>

#include "prpo/errors.hpp"
#include "prpo/evalmetrics.hpp"
#include "prpo/transcript.hpp"

using namespace prpo;

namespace {

// Direct formula evaluation, no shared code with detection_metrics.
DetectionMetrics metrics_oracle(const ConfusionCounts& c) {
  DetectionMetrics m;
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp),
               tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  m.accuracy = (tp + tn) / (tp + fp + tn + fn);
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace

TEST_CASE("detection_metrics hand examples") {
  const auto m = detection_metrics({3, 1, 5, 1});
  CHECK(m.accuracy == doctest::Approx(0.8));
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.75));
  CHECK(m.f1 == doctest::Approx(0.75));

  const auto degenerate = detection_metrics({0, 0, 10, 0});
  CHECK(degenerate.precision == 0.0);
  CHECK(degenerate.recall == 0.0);
  CHECK(degenerate.f1 == 0.0);
  CHECK(degenerate.accuracy == 1.0);

  CHECK_THROWS_AS(detection_metrics({0, 0, 0, 0}), EmptyCounts);
}

TEST_CASE("detection_metrics matches the formula oracle") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionCounts c{rng() % 50, rng() % 50, rng() % 50, rng() % 50};
    if (c.total() == 0) c.tn = 1;
    const auto m = detection_metrics(c);
    const auto o = metrics_oracle(c);
    CHECK(m.accuracy == doctest::Approx(o.accuracy).epsilon(1e-12));
    CHECK(m.precision == doctest::Approx(o.precision).epsilon(1e-12));
    CHECK(m.recall == doctest::Approx(o.recall).epsilon(1e-12));
    CHECK(m.f1 == doctest::Approx(o.f1).epsilon(1e-12));
    CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
  }
}

TEST_CASE("score_corpus tallies with Fake as the positive class") {
  const Lexicon lex = Lexicon::defaults();
  auto t = [](const char* raw) { return segment_transcript(raw); };

  // 2 correct fakes, 1 missed fake, 1 correct real
  const std::vector<std::pair<Transcript, Label>> corpus = {
      {t("x\n\nFinal Answer: fake"), Label::Fake},
      {t("y\n\nFinal Answer: fake"), Label::Fake},
      {t("z\n\nFinal Answer: real"), Label::Fake},
      {t("w\n\nFinal Answer: real"), Label::Real},
  };
  const auto c = score_corpus(corpus, lex);
  CHECK(c.tp == 2);
  CHECK(c.fn == 1);
  CHECK(c.tn == 1);
  CHECK(c.fp == 0);
  CHECK(c.total() == corpus.size());

  const auto all_real = score_corpus({{t("a\n\nFinal Answer: real"), Label::Real}}, lex);
  CHECK(all_real.tp == 0);
  CHECK(all_real.fp == 0);
  CHECK(all_real.fn == 0);
  CHECK(all_real.tn == 1);

  const auto single = score_corpus({{t("a\n\nFinal Answer: fake"), Label::Fake}}, lex);
  CHECK(single.tp == 1);
  CHECK(single.total() == 1);

  CHECK_THROWS_AS(score_corpus({}, lex), EmptyCounts);
}

TEST_CASE("judge prompt substitution") {
  const std::string p =
      build_judge_prompt("The image shows waxy skin.", Label::Fake, Label::Real);
  CHECK(p.find("Response: The image shows waxy skin.") != std::string::npos);
  CHECK(p.find("Prediction: fake") != std::string::npos);
  CHECK(p.find("Ground Truth: real") != std::string::npos);
  CHECK(p.find("{response}") == std::string::npos);
  CHECK(p.find("{prediction}") == std::string::npos);
  CHECK(p.find("{ground_truth}") == std::string::npos);
  // the five-dimension rubric and the JSON skeleton are present
  CHECK(p.find("Clarity & Usefulness") != std::string::npos);
  CHECK(p.find("\"classification_accuracy\": <0-5>") != std::string::npos);
}

TEST_CASE("parse_judge_scores") {
  const char* doc = R"({
    "classification_accuracy": 4,
    "evidence_grounding": 5,
    "reasoning_quality": 4,
    "confidence_calibration": 4,
    "clarity_usefulness": 5,
    "justification": "solid grounding"
  })";
  const auto s = parse_judge_scores(doc);
  CHECK(s.cac == 4);
  CHECK(s.egia == 5);
  CHECK(s.overall == doctest::Approx(4.4).epsilon(1e-12));
  CHECK(s.justification == "solid grounding");

  CHECK_THROWS_AS(parse_judge_scores("{"), MalformedJson);
  CHECK_THROWS_AS(parse_judge_scores(
                      R"({"classification_accuracy": 6, "evidence_grounding": 1,
                          "reasoning_quality": 1, "confidence_calibration": 1,
                          "clarity_usefulness": 1, "justification": "x"})"),
                  ScoreOutOfRange);
  CHECK_THROWS_AS(parse_judge_scores(
                      R"({"classification_accuracy": 4, "evidence_grounding": 1,
                          "reasoning_quality": 1, "confidence_calibration": 1,
                          "clarity_usefulness": 1})"),
                  MissingField);
  // zero is allowed by the printed scale
  CHECK_NOTHROW(parse_judge_scores(
      R"({"classification_accuracy": 0, "evidence_grounding": 0,
          "reasoning_quality": 0, "confidence_calibration": 0,
          "clarity_usefulness": 0, "justification": ""})"));
}

TEST_CASE("parse_judge_scores inverts render_judge_scores") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    JudgeScores s;
    s.cac = rng() % 6;
    s.egia = rng() % 6;
    s.rq = rng() % 6;
    s.cc = rng() % 6;
    s.cu = rng() % 6;
    s.justification = "trial " + std::to_string(trial);
    const auto parsed = parse_judge_scores(render_judge_scores(s));
    CHECK(parsed.cac == s.cac);
    CHECK(parsed.egia == s.egia);
    CHECK(parsed.rq == s.rq);
    CHECK(parsed.cc == s.cc);
    CHECK(parsed.cu == s.cu);
    CHECK(parsed.justification == s.justification);
    CHECK(parsed.overall ==
          doctest::Approx((s.cac + s.egia + s.rq + s.cc + s.cu) / 5.0).epsilon(1e-9));
  }
}

TEST_CASE("run_judge_batch with a scripted client") {
  ScriptedMockClient mock;
  const JudgeBatchRecord rec{"id-1", "Skin looks waxy.", Label::Fake, Label::Fake};
  JudgeScores canned;
  canned.cac = 5;
  canned.egia = 4;
  canned.rq = 4;
  canned.cc = 3;
  canned.cu = 5;
  canned.justification = "good";
  mock.add(build_judge_prompt(rec.response, rec.prediction, rec.ground_truth),
           render_judge_scores(canned));

  const auto results = run_judge_batch({rec}, mock);
  REQUIRE(results.size() == 1);
  CHECK(results[0].id == "id-1");
  CHECK(results[0].scores.cac == 5);
  CHECK(results[0].scores.overall == doctest::Approx((5 + 4 + 4 + 3 + 5) / 5.0));
}
