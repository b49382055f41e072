#ifndef PRPO_POLICY_HPP
#define PRPO_POLICY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "prpo/embedding.hpp"
#include "prpo/rewards.hpp"
#include "prpo/transcript.hpp"

namespace prpo {

struct PromptContext {
  std::string prompt_id;
  ImageDescriptor image;
};

struct PrpoConfig {
  std::size_t group_size = 8;           // L
  double clip_eps = 0.2;                // ratio clip band
  double beta = 0.01;                   // KL weight
  double adv_eps = 1e-8;                // advantage denominator epsilon
  double learning_rate = 0.1;
  std::size_t iterations = 200;
  std::uint64_t seed = 7;
  std::size_t keyword_k = 5;
  bool mean_normalize_surrogate = false;  // divide the surrogate sum by paragraph count

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Per-slot categorical policy over a paragraph bank. The bank holds the
// reasoning candidates followed by the final-answer candidates; each
// reasoning slot owns a logit row over the reasoning candidates, and one
// extra row covers the final candidates.
class ToyPolicy {
 public:
  ToyPolicy(std::vector<std::string> reasoning_bank,
            std::vector<std::string> final_bank, std::size_t reasoning_slots);

  std::size_t reasoning_slots() const { return slots_; }
  std::size_t rows() const { return slots_ + 1; }
  std::size_t reasoning_size() const { return bank_.size() - num_final_; }
  std::size_t final_size() const { return num_final_; }
  const std::vector<std::string>& bank() const { return bank_; }

  // Final-answer bank indices start at reasoning_size().
  std::size_t final_slot() const { return slots_; }
  bool is_final_slot(std::size_t slot) const { return slot == slots_; }

  const std::vector<std::vector<double>>& logits() const { return logits_; }
  std::vector<std::vector<double>>& logits() { return logits_; }

  // Softmax probabilities of one row.
  std::vector<double> row_probs(std::size_t slot) const;

  // log softmax(slot_logits[slot])[bank_index], bank_index global.
  double log_prob(std::size_t slot, std::size_t bank_index) const;

  // Maps a global bank index to its column in the slot's row.
  std::size_t column_of(std::size_t slot, std::size_t bank_index) const;
  std::size_t bank_index_of(std::size_t slot, std::size_t column) const;

  void apply_gradient(const std::vector<std::vector<double>>& grad, double step);

 private:
  std::vector<std::string> bank_;
  std::size_t num_final_;
  std::size_t slots_;
  std::vector<std::vector<double>> logits_;
};

inline double paragraph_log_prob(const ToyPolicy& policy, std::size_t slot,
                                 std::size_t bank_index) {
  return policy.log_prob(slot, bank_index);
}

// L sampled outputs for one prompt with everything the objective needs.
struct GroupSample {
  PromptContext context;
  std::vector<Transcript> outputs;
  std::vector<std::vector<std::size_t>> choices;   // per output, per slot
  std::vector<std::vector<double>> logp_old;       // per output, per paragraph
  std::vector<std::vector<double>> logp_ref;
  std::vector<std::vector<double>> logp_new;
  std::vector<std::vector<double>> rewards;
  std::vector<std::vector<double>> advantages;
};

// Draws cfg.group_size outputs from the policy; logp_old and logp_ref
// are both recorded under the sampling policy (train() re-evaluates
// logp_ref under its frozen reference). Deterministic for a fixed seed.
GroupSample sample_group(const ToyPolicy& policy, const PromptContext& ctx,
                         const PrpoConfig& cfg, std::uint64_t rng_seed);

// Per-paragraph log-probabilities of already-recorded choices under an
// arbitrary policy of identical shape.
std::vector<std::vector<double>> group_log_probs(
    const ToyPolicy& policy, const std::vector<std::vector<std::size_t>>& choices);

// Sum over paragraphs of min(r*A, clip(r, 1-eps, 1+eps)*A),
// r = exp(logp_new - logp_old). A maximization target.
double prpo_surrogate(const std::vector<std::vector<double>>& logp_new,
                      const std::vector<std::vector<double>>& logp_old,
                      const std::vector<std::vector<double>>& advantages,
                      double clip_eps);

// Mean over paragraphs of (logp_new - logp_ref): the naive per-sample
// KL estimate. May be negative on a batch.
double kl_penalty(const std::vector<std::vector<double>>& logp_new,
                  const std::vector<std::vector<double>>& logp_ref);

// surrogate - beta * kl, still a maximization target.
double total_objective(double surrogate, double kl, double beta);

// Exact gradient of total_objective with respect to the slot logits.
// Paragraphs resolved to the clipped branch contribute no ratio-path
// gradient.
std::vector<std::vector<double>> objective_gradient(const ToyPolicy& policy,
                                                    const GroupSample& group,
                                                    const PrpoConfig& cfg);

struct IterationStats {
  std::size_t iter = 0;
  double mean_reward = 0.0;
  double surrogate = 0.0;
  double kl = 0.0;
};

struct TrainingReport {
  std::vector<IterationStats> iterations;
  std::vector<std::vector<double>> final_probs;  // per row, after training
  std::string to_json() const;
};

// Combined rewards per output, per paragraph, for one sampled group.
using GroupRewardFn = std::function<std::vector<std::vector<double>>(
    const std::vector<Transcript>&, const PromptContext&)>;

// Test-time loop: freeze the reference once, then per iteration freeze
// the sampling snapshot, sample a group per context, reward, normalize,
// and take one ascent step on the total objective.
TrainingReport train(ToyPolicy& policy, const std::vector<PromptContext>& contexts,
                     const PrpoConfig& cfg, const GroupRewardFn& rewarder);

// GroupRewardFn backed by the standard reward stack.
GroupRewardFn make_group_rewarder(const Lexicon& lex, const EmbeddingProvider& provider,
                                  std::size_t keyword_k, double adv_eps = 1e-8);

// lm_loss + alpha * binary_loss.
double combined_finetune_loss(double lm_loss, double binary_loss, double alpha);

}  // namespace prpo

#endif
