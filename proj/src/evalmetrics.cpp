#include "prpo/evalmetrics.hpp"

#include <json.hpp>

#include "prpo/errors.hpp"

namespace prpo {

DetectionMetrics detection_metrics(const ConfusionCounts& c) {
  const double total = static_cast<double>(c.total());
  if (c.total() == 0) throw EmptyCounts();

  DetectionMetrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / total;
  m.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  m.f1 = (m.precision + m.recall > 0.0)
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

ConfusionCounts score_corpus(const std::vector<std::pair<Transcript, Label>>& corpus,
                             const Lexicon& lex) {
  if (corpus.empty()) throw EmptyCounts();
  ConfusionCounts c;
  for (const auto& [transcript, truth] : corpus) {
    const Label predicted = extract_final_answer(transcript, lex);
    if (truth == Label::Fake)
      predicted == Label::Fake ? ++c.tp : ++c.fn;
    else
      predicted == Label::Fake ? ++c.fp : ++c.tn;
  }
  return c;
}

namespace {

constexpr const char* kJudgeTemplate =
    R"(You are an expert evaluator for deepfake detection responses. Your task is to evaluate a given response to an image across five critical dimensions for deepfake detection accuracy and reliability.

Scoring Scale: For each dimension, assign an integer score from 0 to 5:
- 0 = Very poor / completely incorrect
- 1 = Poor
- 2 = Fair
- 3 = Good
- 4 = Very good
- 5 = Excellent

Evaluation Dimensions
1. Classification Accuracy & Consistency:
   Does the response correctly classify the image as real or fake?
   Is the classification consistent with both the ground truth and the reasoning provided?

2. Reasoning Quality:
   Does the response provide a logical, step-by-step explanation of its decision?
   Is the reasoning free from contradictions or irrelevant details?

3. Evidence Grounding & Image Alignment:
   Does the response cite specific visual artifacts that are actually present in the image?
   Does it avoid hallucinations (mentioning features not visible)?

4. Confidence Calibration:
   Is the expressed confidence level appropriate given the clarity of evidence in the image?
   Does the response avoid overstating or understating certainty?

5. Clarity & Usefulness:
   Is the response clear, well-structured, and easy to understand?
   Would it be useful for a human investigator verifying deepfake authenticity?

Output Format
Respond strictly in JSON with this structure:
{
  "classification_accuracy": <0-5>,
  "evidence_grounding": <0-5>,
  "reasoning_quality": <0-5>,
  "confidence_calibration": <0-5>,
  "clarity_usefulness": <0-5>,
  "justification": "<concise explanation of the scoring rationale>"
}

Evaluation Task
Now evaluate the given image with the following details:
Response: {response}
Prediction: {prediction}
Ground Truth: {ground_truth})";

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

int read_score_field(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw MissingField(std::string("judge scores: missing '") + field + "'");
  const auto& v = j.at(field);
  if (!v.is_number_integer())
    throw ScoreOutOfRange(std::string("judge scores: '") + field + "' must be an integer 0..5");
  const int score = v.get<int>();
  if (score < 0 || score > 5)
    throw ScoreOutOfRange(std::string("judge scores: '") + field + "' = " +
                          std::to_string(score) + " outside [0, 5]");
  return score;
}

}  // namespace

std::string build_judge_prompt(const std::string& response, Label prediction,
                               Label ground_truth) {
  std::string out = kJudgeTemplate;
  out = replace_once(out, "{response}", response);
  out = replace_once(out, "{prediction}", to_string(prediction));
  out = replace_once(out, "{ground_truth}", to_string(ground_truth));
  return out;
}

JudgeScores parse_judge_scores(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedJson(std::string("judge scores: ") + e.what());
  }
  if (!j.is_object()) throw MalformedJson("judge scores: expected a JSON object");

  JudgeScores s;
  s.cac = read_score_field(j, "classification_accuracy");
  s.egia = read_score_field(j, "evidence_grounding");
  s.rq = read_score_field(j, "reasoning_quality");
  s.cc = read_score_field(j, "confidence_calibration");
  s.cu = read_score_field(j, "clarity_usefulness");
  if (!j.contains("justification") || !j.at("justification").is_string())
    throw MissingField("judge scores: missing 'justification'");
  s.justification = j.at("justification").get<std::string>();
  s.overall = static_cast<double>(s.cac + s.egia + s.rq + s.cc + s.cu) / 5.0;
  return s;
}

std::string render_judge_scores(const JudgeScores& s) {
  nlohmann::ordered_json j;
  j["classification_accuracy"] = s.cac;
  j["evidence_grounding"] = s.egia;
  j["reasoning_quality"] = s.rq;
  j["confidence_calibration"] = s.cc;
  j["clarity_usefulness"] = s.cu;
  j["justification"] = s.justification;
  return j.dump(2);
}

std::vector<JudgeBatchResult> run_judge_batch(const std::vector<JudgeBatchRecord>& batch,
                                              ChatClient& client) {
  std::vector<JudgeBatchResult> results;
  results.reserve(batch.size());
  for (const auto& rec : batch) {
    const std::string prompt = build_judge_prompt(rec.response, rec.prediction, rec.ground_truth);
    results.push_back({rec.id, parse_judge_scores(client.complete(prompt))});
  }
  return results;
}

}  // namespace prpo
