#include "prpo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "prpo/errors.hpp"

namespace prpo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(seed ^ splitmix64(a + 1)) ^ splitmix64((b + 1) * 0x9e3779b97f4a7c15ull));
}

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_categorical(const std::vector<double>& probs, std::mt19937_64& rng) {
  const double u = next_uniform(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.size() - 1;
}

double log_sum_exp(const std::vector<double>& row) {
  const double m = *std::max_element(row.begin(), row.end());
  double s = 0.0;
  for (double x : row) s += std::exp(x - m);
  return m + std::log(s);
}

void check_aligned(const std::vector<std::vector<double>>& a,
                   const std::vector<std::vector<double>>& b, const char* what) {
  if (a.size() != b.size()) throw ShapeMismatch(std::string(what) + ": output count differs");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size())
      throw ShapeMismatch(std::string(what) + ": paragraph count differs at output " +
                          std::to_string(i));
  }
}

std::size_t total_paragraphs(const std::vector<std::vector<double>>& a) {
  std::size_t n = 0;
  for (const auto& row : a) n += row.size();
  return n;
}

}  // namespace

void PrpoConfig::validate() const {
  if (group_size < 1) throw ConfigError("group_size", "must be >= 1");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw ConfigError("clip_eps", "must be in (0, 1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta", "must be >= 0");
  if (!(adv_eps > 0.0)) throw ConfigError("adv_eps", "must be > 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate", "must be > 0");
  if (keyword_k < 1) throw ConfigError("keyword_k", "must be >= 1");
}

ToyPolicy::ToyPolicy(std::vector<std::string> reasoning_bank,
                     std::vector<std::string> final_bank, std::size_t reasoning_slots)
    : num_final_(final_bank.size()), slots_(reasoning_slots) {
  if (final_bank.size() < 2)
    throw DataError("ToyPolicy: need at least 2 final-answer candidates");
  if (reasoning_slots >= 1 && reasoning_bank.empty())
    throw DataError("ToyPolicy: reasoning slots configured but no reasoning candidates");

  bank_ = std::move(reasoning_bank);
  bank_.insert(bank_.end(), std::make_move_iterator(final_bank.begin()),
               std::make_move_iterator(final_bank.end()));

  for (std::size_t i = 0; i < bank_.size(); ++i) {
    const Transcript t = segment_transcript(bank_[i]);  // throws on blank entries
    if (t.paragraphs.size() != 1)
      throw DataError("ToyPolicy: bank entry " + std::to_string(i) +
                      " contains a blank-line break");
    if (i < reasoning_size() && starts_with_final_marker(bank_[i]))
      throw DataError("ToyPolicy: reasoning candidate " + std::to_string(i) +
                      " starts with the final-answer marker");
  }

  logits_.assign(slots_, std::vector<double>(reasoning_size(), 0.0));
  logits_.push_back(std::vector<double>(num_final_, 0.0));
}

std::vector<double> ToyPolicy::row_probs(std::size_t slot) const {
  if (slot >= logits_.size()) throw IndexError("row_probs: slot out of range");
  const auto& row = logits_[slot];
  const double m = *std::max_element(row.begin(), row.end());
  std::vector<double> p(row.size());
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    p[i] = std::exp(row[i] - m);
    s += p[i];
  }
  for (double& x : p) x /= s;
  return p;
}

std::size_t ToyPolicy::column_of(std::size_t slot, std::size_t bank_index) const {
  if (slot >= logits_.size()) throw IndexError("slot out of range");
  if (is_final_slot(slot)) {
    if (bank_index < reasoning_size() || bank_index >= bank_.size())
      throw IndexError("bank index is not a final-answer candidate");
    return bank_index - reasoning_size();
  }
  if (bank_index >= reasoning_size())
    throw IndexError("bank index is not a reasoning candidate");
  return bank_index;
}

std::size_t ToyPolicy::bank_index_of(std::size_t slot, std::size_t column) const {
  if (slot >= logits_.size()) throw IndexError("slot out of range");
  if (column >= logits_[slot].size()) throw IndexError("column out of range");
  return is_final_slot(slot) ? reasoning_size() + column : column;
}

double ToyPolicy::log_prob(std::size_t slot, std::size_t bank_index) const {
  const std::size_t col = column_of(slot, bank_index);
  const auto& row = logits_[slot];
  return row[col] - log_sum_exp(row);
}

void ToyPolicy::apply_gradient(const std::vector<std::vector<double>>& grad, double step) {
  if (grad.size() != logits_.size()) throw ShapeMismatch("gradient row count differs");
  for (std::size_t r = 0; r < grad.size(); ++r) {
    if (grad[r].size() != logits_[r].size())
      throw ShapeMismatch("gradient width differs at row " + std::to_string(r));
    for (std::size_t c = 0; c < grad[r].size(); ++c) logits_[r][c] += step * grad[r][c];
  }
}

GroupSample sample_group(const ToyPolicy& policy, const PromptContext& ctx,
                         const PrpoConfig& cfg, std::uint64_t rng_seed) {
  cfg.validate();
  std::mt19937_64 rng(rng_seed);

  // Row probabilities are fixed for the whole group.
  std::vector<std::vector<double>> probs(policy.rows());
  for (std::size_t r = 0; r < policy.rows(); ++r) probs[r] = policy.row_probs(r);

  GroupSample g;
  g.context = ctx;
  for (std::size_t l = 0; l < cfg.group_size; ++l) {
    std::vector<std::size_t> choice(policy.rows());
    std::vector<double> logp(policy.rows());
    std::string text;
    for (std::size_t slot = 0; slot < policy.rows(); ++slot) {
      const std::size_t col = sample_categorical(probs[slot], rng);
      const std::size_t bank_index = policy.bank_index_of(slot, col);
      choice[slot] = bank_index;
      logp[slot] = policy.log_prob(slot, bank_index);
      if (slot) text += "\n\n";
      text += policy.bank()[bank_index];
    }
    g.outputs.push_back(segment_transcript(text));
    g.choices.push_back(std::move(choice));
    g.logp_old.push_back(logp);
    g.logp_ref.push_back(logp);
    g.logp_new.push_back(std::move(logp));
  }
  return g;
}

std::vector<std::vector<double>> group_log_probs(
    const ToyPolicy& policy, const std::vector<std::vector<std::size_t>>& choices) {
  std::vector<std::vector<double>> out(choices.size());
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (choices[i].size() != policy.rows())
      throw ShapeMismatch("group_log_probs: choice row " + std::to_string(i) +
                          " does not match the policy's slot count");
    out[i].reserve(choices[i].size());
    for (std::size_t slot = 0; slot < choices[i].size(); ++slot)
      out[i].push_back(policy.log_prob(slot, choices[i][slot]));
  }
  return out;
}

double prpo_surrogate(const std::vector<std::vector<double>>& logp_new,
                      const std::vector<std::vector<double>>& logp_old,
                      const std::vector<std::vector<double>>& advantages,
                      double clip_eps) {
  if (!(clip_eps > 0.0 && clip_eps < 1.0))
    throw DomainError("prpo_surrogate: clip_eps must be in (0, 1)");
  check_aligned(logp_new, logp_old, "prpo_surrogate(new/old)");
  check_aligned(logp_new, advantages, "prpo_surrogate(new/advantages)");

  double total = 0.0;
  for (std::size_t i = 0; i < logp_new.size(); ++i) {
    for (std::size_t j = 0; j < logp_new[i].size(); ++j) {
      const double r = std::exp(logp_new[i][j] - logp_old[i][j]);
      const double a = advantages[i][j];
      const double clipped = std::clamp(r, 1.0 - clip_eps, 1.0 + clip_eps);
      total += std::min(r * a, clipped * a);
    }
  }
  return total;
}

double kl_penalty(const std::vector<std::vector<double>>& logp_new,
                  const std::vector<std::vector<double>>& logp_ref) {
  check_aligned(logp_new, logp_ref, "kl_penalty");
  const std::size_t n = total_paragraphs(logp_new);
  if (n == 0) throw ShapeMismatch("kl_penalty: at least one paragraph required");
  double total = 0.0;
  for (std::size_t i = 0; i < logp_new.size(); ++i)
    for (std::size_t j = 0; j < logp_new[i].size(); ++j)
      total += logp_new[i][j] - logp_ref[i][j];
  return total / static_cast<double>(n);
}

double total_objective(double surrogate, double kl, double beta) {
  if (!(beta >= 0.0)) throw DomainError("total_objective: beta must be >= 0");
  return surrogate - beta * kl;
}

std::vector<std::vector<double>> objective_gradient(const ToyPolicy& policy,
                                                    const GroupSample& group,
                                                    const PrpoConfig& cfg) {
  check_aligned(group.logp_old, group.advantages, "objective_gradient(old/advantages)");
  const std::size_t n = total_paragraphs(group.logp_old);
  if (n == 0) throw ShapeMismatch("objective_gradient: empty group");
  if (group.choices.size() != group.logp_old.size())
    throw ShapeMismatch("objective_gradient: choices misaligned with log-probs");

  std::vector<std::vector<double>> probs(policy.rows());
  for (std::size_t r = 0; r < policy.rows(); ++r) probs[r] = policy.row_probs(r);

  std::vector<std::vector<double>> grad(policy.rows());
  for (std::size_t r = 0; r < policy.rows(); ++r) grad[r].assign(probs[r].size(), 0.0);

  const double kl_coef = cfg.beta / static_cast<double>(n);
  const double surr_scale =
      cfg.mean_normalize_surrogate ? 1.0 / static_cast<double>(n) : 1.0;

  for (std::size_t i = 0; i < group.choices.size(); ++i) {
    if (group.choices[i].size() != policy.rows())
      throw ShapeMismatch("objective_gradient: choice width differs at output " +
                          std::to_string(i));
    for (std::size_t slot = 0; slot < policy.rows(); ++slot) {
      const std::size_t col = policy.column_of(slot, group.choices[i][slot]);
      const double logp_new = policy.log_prob(slot, group.choices[i][slot]);
      const double r = std::exp(logp_new - group.logp_old[i][slot]);
      const double a = group.advantages[i][slot];
      const double clipped = std::clamp(r, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);

      // min() resolves to the ratio path unless the clipped branch is
      // strictly smaller, which only happens with r outside the band.
      double coef = (r * a <= clipped * a) ? surr_scale * a * r : 0.0;
      coef -= kl_coef;

      auto& row = grad[slot];
      const auto& p = probs[slot];
      for (std::size_t m = 0; m < row.size(); ++m)
        row[m] += coef * ((m == col ? 1.0 : 0.0) - p[m]);
    }
  }
  return grad;
}

std::string TrainingReport::to_json() const {
  nlohmann::json j;
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : iterations) {
    j["iterations"].push_back({{"iter", it.iter},
                               {"mean_reward", it.mean_reward},
                               {"surrogate", it.surrogate},
                               {"kl", it.kl}});
  }
  nlohmann::json probs;
  for (std::size_t r = 0; r + 1 < final_probs.size(); ++r)
    probs["slot_" + std::to_string(r)] = final_probs[r];
  if (!final_probs.empty()) probs["final"] = final_probs.back();
  j["final_probs"] = probs;
  return j.dump(2);
}

TrainingReport train(ToyPolicy& policy, const std::vector<PromptContext>& contexts,
                     const PrpoConfig& cfg, const GroupRewardFn& rewarder) {
  cfg.validate();
  if (contexts.empty()) throw DataError("train: at least one prompt context required");

  const ToyPolicy reference = policy;  // frozen for the whole loop
  TrainingReport report;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const ToyPolicy snapshot = policy;  // pi_old for this iteration

    std::vector<std::vector<double>> grad_total(policy.rows());
    for (std::size_t r = 0; r < policy.rows(); ++r)
      grad_total[r].assign(policy.logits()[r].size(), 0.0);

    double reward_sum = 0.0, surrogate_sum = 0.0, kl_sum = 0.0;
    std::size_t reward_count = 0;

    for (std::size_t ci = 0; ci < contexts.size(); ++ci) {
      GroupSample group = sample_group(snapshot, contexts[ci], cfg,
                                       mix_seed(cfg.seed, it, ci));
      group.rewards = rewarder(group.outputs, contexts[ci]);
      check_aligned(group.rewards, group.logp_old, "train(rewards)");
      group.advantages = group_advantages(group.rewards, cfg.adv_eps);
      group.logp_ref = group_log_probs(reference, group.choices);
      group.logp_new = group_log_probs(policy, group.choices);

      double surrogate =
          prpo_surrogate(group.logp_new, group.logp_old, group.advantages, cfg.clip_eps);
      if (cfg.mean_normalize_surrogate)
        surrogate /= static_cast<double>(total_paragraphs(group.logp_new));
      const double kl = kl_penalty(group.logp_new, group.logp_ref);

      const auto grad = objective_gradient(policy, group, cfg);
      for (std::size_t r = 0; r < grad.size(); ++r)
        for (std::size_t c = 0; c < grad[r].size(); ++c) grad_total[r][c] += grad[r][c];

      for (const auto& out : group.rewards)
        for (double x : out) {
          reward_sum += x;
          ++reward_count;
        }
      surrogate_sum += surrogate;
      kl_sum += kl;
    }

    policy.apply_gradient(grad_total, cfg.learning_rate);
    report.iterations.push_back({it, reward_sum / static_cast<double>(reward_count),
                                 surrogate_sum,
                                 kl_sum / static_cast<double>(contexts.size())});
  }

  report.final_probs.resize(policy.rows());
  for (std::size_t r = 0; r < policy.rows(); ++r) report.final_probs[r] = policy.row_probs(r);
  return report;
}

GroupRewardFn make_group_rewarder(const Lexicon& lex, const EmbeddingProvider& provider,
                                  std::size_t keyword_k, double adv_eps) {
  return [&lex, &provider, keyword_k, adv_eps](const std::vector<Transcript>& outputs,
                                               const PromptContext& ctx) {
    const auto breakdown = score_group(outputs, ctx.image, lex, provider, keyword_k, adv_eps);
    std::vector<std::vector<double>> combined(breakdown.size());
    for (std::size_t i = 0; i < breakdown.size(); ++i) {
      combined[i].reserve(breakdown[i].size());
      for (const auto& b : breakdown[i]) combined[i].push_back(b.combined);
    }
    return combined;
  };
}

double combined_finetune_loss(double lm_loss, double binary_loss, double alpha) {
  if (!(lm_loss >= 0.0)) throw DomainError("combined_finetune_loss: lm_loss must be >= 0");
  if (!(binary_loss >= 0.0))
    throw DomainError("combined_finetune_loss: binary_loss must be >= 0");
  if (!(alpha >= 0.0)) throw DomainError("combined_finetune_loss: alpha must be >= 0");
  return lm_loss + alpha * binary_loss;
}

}  // namespace prpo
