#ifndef PRPO_PIPELINE_HPP
#define PRPO_PIPELINE_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "prpo/label.hpp"

namespace prpo {

// One feature verdict from the scoring step: real (-1), fake (+1),
// uncertain (0).
struct FeatureScore {
  int feature_index = 0;  // 1-based
  int score = 0;
};

// One annotated image: feature groups, per-group reasoning text, and the
// ground-truth answer.
struct ReasoningRecord {
  std::string image_id;
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;  // insertion order
  std::map<std::string, std::string> reasonings;
  Label answer = Label::Real;

  // Renders the record as a reasoning transcript: one paragraph per
  // group, then the final-answer line.
  std::string to_transcript_text() const;
};

// Chat-model role behind the generation pipeline.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string backend_name() const = 0;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Hermetic stand-in: canned responses keyed by prompt hash, with call
// counting. Unknown prompts throw, carrying the hash so a fixture can be
// extended.
class ScriptedMockClient final : public ChatClient {
 public:
  ScriptedMockClient() = default;
  static ScriptedMockClient from_json_text(const std::string& json_text);
  static ScriptedMockClient load(const std::string& path);

  void add(const std::string& prompt, const std::string& response);
  void add_by_hash(const std::string& prompt_hash_hex, const std::string& response);
  static std::string prompt_hash(const std::string& prompt);

  std::string backend_name() const override { return "mock"; }
  std::string complete(const std::string& prompt) override;

  std::size_t call_count() const { return calls_; }

 private:
  std::map<std::string, std::string> responses_;
  std::size_t calls_ = 0;
};

struct ChatClientConfig {
  std::string backend = "mock";
  std::string endpoint;            // remote only
  std::string auth_token_env;      // name of the env var holding the token
  std::string responses_path;      // mock only
  int timeout_ms = 10000;
  int max_retries = 3;
  int parallelism = 1;
};

// POSTs {"prompt": ...} and expects {"completion": ...}; bearer token
// read from the env var named in the config. Retries with exponential
// backoff, then throws ProviderFailure.
class RemoteChatClient final : public ChatClient {
 public:
  explicit RemoteChatClient(ChatClientConfig cfg);
  std::string backend_name() const override { return "remote:" + cfg_.endpoint; }
  std::string complete(const std::string& prompt) override;

 private:
  ChatClientConfig cfg_;
};

ChatClientConfig parse_chat_client_config(const std::string& json_text);
std::unique_ptr<ChatClient> make_chat_client(const ChatClientConfig& cfg);

// ---- Step 1: feature discovery ----

// The discovery template with {K} substituted. K >= 1.
std::string build_feature_discovery_prompt(std::size_t K);

// The consolidation template; expects exactly the four lists keyed
// "gpt", "gemini", "qwen", "llama".
std::string build_consolidation_prompt(
    const std::map<std::string, std::vector<std::string>>& features_by_model);

// Case-insensitive exact-duplicate filter, first occurrence kept. The
// semantic consolidation itself is the model's job.
std::vector<std::string> dedup_features(const std::vector<std::string>& features);

// ---- Step 2: feature scoring ----

std::string build_scoring_prompt(const std::vector<std::string>& features);

// Inverse of parse_feature_scores; also the canonical response shape
// served by scripted mocks.
std::string render_feature_scores(const std::vector<FeatureScore>& scores, Label final_answer);

// Extracts exactly k scores (index order 1..k) plus the trailing final
// answer. Throws MissingScores / InvalidScore / MissingFinalAnswer.
std::pair<std::vector<FeatureScore>, Label> parse_feature_scores(const std::string& response,
                                                                 std::size_t k);

// Re-scoring prompt for the flagged 1-based feature indices, carrying
// the ground-truth label. Responses reuse the {feature i: <score>}
// format with the ORIGINAL indices.
std::string build_refinement_prompt(const std::vector<int>& flagged_indices,
                                    Label ground_truth);

// Up to `budget` rounds of re-prompting for features scored 0 or
// contradicting the ground truth; agreeing features are never touched.
std::vector<FeatureScore> refine_uncertain(const std::vector<FeatureScore>& scores,
                                           Label ground_truth, ChatClient& client,
                                           std::size_t budget);

// ---- Step 3: reasoning generation ----

std::string build_grouping_prompt(const std::vector<std::string>& features, Label label,
                                  std::size_t M);

// Validates the grouping response document: groups object, one reasoning
// string per group, group budget M, unique features, real/fake answer.
ReasoningRecord parse_reasoning_record(const std::string& json_text, std::size_t M,
                                       const std::string& image_id);

std::string render_reasoning_record(const ReasoningRecord& rec);

// ---- Corpus statistics ----

struct CategoryStat {
  std::size_t count = 0;
  double percent = 0.0;
};

std::map<std::string, CategoryStat> feature_category_stats(
    const std::vector<ReasoningRecord>& records,
    const std::map<std::string, std::string>& category_map);

}  // namespace prpo

#endif
