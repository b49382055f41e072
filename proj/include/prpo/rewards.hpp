#ifndef PRPO_REWARDS_HPP
#define PRPO_REWARDS_HPP

#include <cstddef>
#include <vector>

#include "prpo/embedding.hpp"
#include "prpo/keywords.hpp"
#include "prpo/lexicon.hpp"
#include "prpo/transcript.hpp"

namespace prpo {

// Per-paragraph reward components. combined is always the exact average
// of the two; advantage is filled in by group normalization.
struct RewardBreakdown {
  double vcr = 0.0;
  double pcr = 0.0;
  double combined = 0.0;
  double advantage = 0.0;
};

// (cosine(keywords, image) + 1) / 2 in [0, 1]; 0.5 when either side
// embeds to the zero vector.
double visual_consistency_reward(const Paragraph& p, const ImageDescriptor& img,
                                 const EmbeddingProvider& provider, std::size_t k);

// 1.0 for every reasoning paragraph. For the final paragraph, 1.0 iff
// the majority label of the preceding paragraphs (ties resolved toward
// the final answer) agrees with the final answer.
std::vector<double> prediction_consistency_reward(const Transcript& t, const Lexicon& lex);

// (vcr + pcr) / 2, with range checks.
double combined_reward(double vcr, double pcr);

// Group-relative normalization over the flattened multiset of paragraph
// rewards: A = (R - mean) / (std + eps), population std. All-equal
// rewards give exact zeros.
std::vector<std::vector<double>> group_advantages(
    const std::vector<std::vector<double>>& rewards, double eps = 1e-8);

// Full per-paragraph breakdown for one group of outputs against one image.
std::vector<std::vector<RewardBreakdown>> score_group(
    const std::vector<Transcript>& outputs, const ImageDescriptor& img,
    const Lexicon& lex, const EmbeddingProvider& provider, std::size_t k,
    double adv_eps = 1e-8);

}  // namespace prpo

#endif
