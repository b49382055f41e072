#ifndef PRPO_EVALMETRICS_HPP
#define PRPO_EVALMETRICS_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "prpo/label.hpp"
#include "prpo/lexicon.hpp"
#include "prpo/pipeline.hpp"
#include "prpo/transcript.hpp"

namespace prpo {

// Fake is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

struct DetectionMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Standard definitions; precision/recall/f1 fall back to 0 when their
// denominator is 0. Throws EmptyCounts on an all-zero matrix.
DetectionMetrics detection_metrics(const ConfusionCounts& c);

// Tallies extract_final_answer against ground truth.
ConfusionCounts score_corpus(const std::vector<std::pair<Transcript, Label>>& corpus,
                             const Lexicon& lex);

// The five explanation-quality criteria plus their unweighted mean.
struct JudgeScores {
  int cac = 0;   // classification accuracy & consistency
  int egia = 0;  // evidence grounding & image alignment
  int rq = 0;    // reasoning quality
  int cc = 0;    // confidence calibration
  int cu = 0;    // clarity & usefulness
  std::string justification;
  double overall = 0.0;
};

// The evaluation template with response/prediction/ground-truth filled in.
std::string build_judge_prompt(const std::string& response, Label prediction,
                               Label ground_truth);

// Parses the judge's strict-JSON reply. Throws MalformedJson,
// ScoreOutOfRange, or MissingField.
JudgeScores parse_judge_scores(const std::string& json_text);

// Inverse of parse_judge_scores (canonical mock reply shape).
std::string render_judge_scores(const JudgeScores& s);

struct JudgeBatchRecord {
  std::string id;
  std::string response;
  Label prediction = Label::Real;
  Label ground_truth = Label::Real;
};

struct JudgeBatchResult {
  std::string id;
  JudgeScores scores;
};

// Builds one prompt per record, queries the client, parses each reply.
std::vector<JudgeBatchResult> run_judge_batch(const std::vector<JudgeBatchRecord>& batch,
                                              ChatClient& client);

}  // namespace prpo

#endif
