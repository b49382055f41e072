#include "prpo/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "prpo/errors.hpp"

namespace prpo {

double visual_consistency_reward(const Paragraph& p, const ImageDescriptor& img,
                                 const EmbeddingProvider& provider, std::size_t k) {
  const auto keywords = extract_keywords(p, k);
  const auto text_vec = provider.embed_text(keywords);
  const auto img_vec = provider.embed_image(img);
  return (cosine_similarity(text_vec, img_vec) + 1.0) / 2.0;
}

std::vector<double> prediction_consistency_reward(const Transcript& t, const Lexicon& lex) {
  std::vector<double> rewards(t.paragraphs.size(), 1.0);

  const Label a_final = extract_final_answer(t, lex);
  int v_real = 0, v_fake = 0;
  for (std::size_t j = 0; j + 1 < t.paragraphs.size(); ++j) {
    if (predict_label(score_paragraph(t.paragraphs[j], lex)) == Label::Real)
      ++v_real;
    else
      ++v_fake;
  }
  Label a_maj = a_final;  // tie falls back to the final answer
  if (v_real > v_fake)
    a_maj = Label::Real;
  else if (v_fake > v_real)
    a_maj = Label::Fake;
  rewards.back() = (a_maj == a_final) ? 1.0 : 0.0;
  return rewards;
}

double combined_reward(double vcr, double pcr) {
  if (!(vcr >= 0.0 && vcr <= 1.0))
    throw DomainError("combined_reward: vcr must be in [0, 1]");
  if (pcr != 0.0 && pcr != 1.0)
    throw DomainError("combined_reward: pcr must be 0 or 1");
  return (vcr + pcr) / 2.0;
}

std::vector<std::vector<double>> group_advantages(
    const std::vector<std::vector<double>>& rewards, double eps) {
  if (eps <= 0.0) throw DomainError("group_advantages: eps must be > 0");

  std::size_t n = 0;
  double sum = 0.0;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& out : rewards) {
    for (double r : out) {
      sum += r;
      lo = first ? r : std::min(lo, r);
      hi = first ? r : std::max(hi, r);
      first = false;
      ++n;
    }
  }
  if (n == 0) throw DomainError("group_advantages: at least one paragraph required");

  std::vector<std::vector<double>> advantages(rewards.size());
  if (lo == hi) {  // sigma == 0: all advantages are exactly zero
    for (std::size_t i = 0; i < rewards.size(); ++i)
      advantages[i].assign(rewards[i].size(), 0.0);
    return advantages;
  }

  const double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const auto& out : rewards) {
    for (double r : out) {
      const double d = r - mean;
      var += d * d;
    }
  }
  const double sigma = std::sqrt(var / static_cast<double>(n));

  for (std::size_t i = 0; i < rewards.size(); ++i) {
    advantages[i].reserve(rewards[i].size());
    for (double r : rewards[i]) advantages[i].push_back((r - mean) / (sigma + eps));
  }
  return advantages;
}

std::vector<std::vector<RewardBreakdown>> score_group(
    const std::vector<Transcript>& outputs, const ImageDescriptor& img,
    const Lexicon& lex, const EmbeddingProvider& provider, std::size_t k,
    double adv_eps) {
  std::vector<std::vector<RewardBreakdown>> breakdown(outputs.size());
  std::vector<std::vector<double>> combined(outputs.size());

  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto pcr = prediction_consistency_reward(outputs[i], lex);
    breakdown[i].resize(pcr.size());
    combined[i].resize(pcr.size());
    for (std::size_t j = 0; j < pcr.size(); ++j) {
      RewardBreakdown& b = breakdown[i][j];
      b.vcr = visual_consistency_reward(outputs[i].paragraphs[j], img, provider, k);
      b.pcr = pcr[j];
      b.combined = combined_reward(b.vcr, b.pcr);
      combined[i][j] = b.combined;
    }
  }

  const auto adv = group_advantages(combined, adv_eps);
  for (std::size_t i = 0; i < outputs.size(); ++i)
    for (std::size_t j = 0; j < adv[i].size(); ++j) breakdown[i][j].advantage = adv[i][j];
  return breakdown;
}

}  // namespace prpo
