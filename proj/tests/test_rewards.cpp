#include <doctest.h>

#include <cmath>
#include <random>

#include "prpo/embedding.hpp"
#include "prpo/errors.hpp"
#include "prpo/keywords.hpp"
#include "prpo/rewards.hpp"
#include "prpo/transcript.hpp"

using namespace prpo;

namespace {

Paragraph para(const std::string& text) { return Paragraph{0, text, false}; }

// Plain-loop cosine, independent of the library path.
double cosine_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Finds a token whose hash coordinate at `dim` differs from every
// coordinate used by `taken`.
std::string disjoint_token(const std::vector<std::string>& taken, std::size_t dim) {
  auto coord = [dim](const std::string& tok) {
    const auto v = reference_embedding({tok}, dim);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0.0) return i;
    return dim;
  };
  std::vector<std::size_t> used;
  for (const auto& t : taken) used.push_back(coord(t));
  for (int i = 0; i < 10000; ++i) {
    const std::string candidate = "tok" + std::to_string(i);
    const std::size_t c = coord(candidate);
    bool clash = false;
    for (std::size_t u : used) clash |= (u == c);
    if (!clash) return candidate;
  }
  FAIL("no disjoint token found");
  return "";
}

const Lexicon& lex() {
  static const Lexicon instance = Lexicon::defaults();
  return instance;
}

// Sentences with hand-checked labels under the default lexicon.
struct BankSentence {
  const char* text;
  Label label;
};
const std::vector<BankSentence>& sentence_bank() {
  static const std::vector<BankSentence> bank = {
      {"The skin texture looks unnatural and overly smooth.", Label::Fake},
      {"Lighting on the cheek is inconsistent with the background.", Label::Fake},
      {"An artificial sheen covers the forehead.", Label::Fake},
      {"Compression artifacts surround the hairline.", Label::Fake},
      {"The face appears authentic and the pose is natural.", Label::Real},
      {"Colors are consistent across the whole frame.", Label::Real},
      {"The iris pattern looks realistic.", Label::Real},
      {"The hair is tied back at the side.", Label::Real},
  };
  return bank;
}

Transcript make_transcript(const std::vector<int>& sentence_ids, Label final_answer) {
  std::string raw;
  for (int id : sentence_ids) {
    raw += sentence_bank()[id].text;
    raw += "\n\n";
  }
  raw += "Final Answer: " + to_string(final_answer);
  return segment_transcript(raw);
}

// Majority vote recomputed from the hand-frozen sentence labels.
std::vector<double> pcr_oracle(const std::vector<int>& sentence_ids, Label final_answer) {
  int v_real = 0, v_fake = 0;
  for (int id : sentence_ids)
    (sentence_bank()[id].label == Label::Real ? v_real : v_fake) += 1;
  Label majority = final_answer;
  if (v_real > v_fake) majority = Label::Real;
  if (v_fake > v_real) majority = Label::Fake;
  std::vector<double> expected(sentence_ids.size(), 1.0);
  expected.push_back(majority == final_answer ? 1.0 : 0.0);
  return expected;
}

}  // namespace

TEST_CASE("extract_keywords ranking") {
  CHECK(extract_keywords("skin skin unnatural", 1) == std::vector<std::string>{"skin"});
  CHECK(extract_keywords("?!., --- ...", 3).empty());
  CHECK(extract_keywords("the lighting direction is inconsistent with the background lighting",
                         2) == std::vector<std::string>({"lighting", "direction"}));
  CHECK_THROWS_AS(extract_keywords("anything", 0), DomainError);
}

TEST_CASE("extract_keywords is deterministic, distinct, lowercase") {
  const auto kws = extract_keywords("Skin SKIN skin pore Pore edge", 10);
  CHECK(kws == std::vector<std::string>({"skin", "pore", "edge"}));
}

TEST_CASE("reference_embedding basics") {
  const auto zero = reference_embedding({}, 256);
  CHECK(zero.size() == 256);
  for (double x : zero) CHECK(x == 0.0);

  CHECK(reference_embedding({"skin"}, 256) == reference_embedding({"skin"}, 256));
  CHECK(reference_embedding({"skin", "pore"}, 256) ==
        reference_embedding({"pore", "skin"}, 256));

  double norm2 = 0;
  for (double x : reference_embedding({"skin", "pore", "edge"}, 64)) norm2 += x * x;
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(reference_embedding({"skin"}, 4), DomainError);
}

TEST_CASE("visual_consistency_reward exact endpoints") {
  const ReferenceEmbeddingProvider provider(64);

  // identical keywords and tags: cosine of the vector with itself
  const ImageDescriptor same{"img", {"skin", "pore", "edge"}, std::nullopt};
  CHECK(visual_consistency_reward(para("skin pore edge"), same, provider, 5) == 1.0);

  // coordinates disjoint by construction: orthogonality
  const std::string other = disjoint_token({"skin"}, 64);
  const ImageDescriptor disjoint{"img", {other}, std::nullopt};
  CHECK(visual_consistency_reward(para("skin"), disjoint, provider, 5) == 0.5);

  // empty keyword list: zero vector, reward 0.5
  const ImageDescriptor tags{"img", {"skin"}, std::nullopt};
  CHECK(visual_consistency_reward(para("?!"), tags, provider, 5) == 0.5);
}

TEST_CASE("visual_consistency_reward matches a direct cosine computation") {
  const ReferenceEmbeddingProvider provider(64);
  std::mt19937 rng(42);
  const std::vector<std::string> vocab = {"skin", "pore", "edge",  "light", "tone",
                                          "blur", "grain", "shadow", "halo",  "seam"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    std::vector<std::string> tags;
    for (int i = 0; i < 4; ++i) {
      text += vocab[rng() % vocab.size()] + " ";
      tags.push_back(vocab[rng() % vocab.size()]);
    }
    const ImageDescriptor img{"img", tags, std::nullopt};
    const double vcr = visual_consistency_reward(para(text), img, provider, 5);
    const double expected =
        (cosine_oracle(provider.embed_text(extract_keywords(text, 5)),
                       provider.embed_image(img)) +
         1.0) /
        2.0;
    CHECK(vcr == doctest::Approx(expected).epsilon(1e-12));
    CHECK(vcr >= 0.0);
    CHECK(vcr <= 1.0);
  }
}

TEST_CASE("VCR depends only on the top-k keywords") {
  const ReferenceEmbeddingProvider provider(64);
  const ImageDescriptor img{"img", {"skin", "light"}, std::nullopt};
  // same top-2 keywords, different filler
  const double a = visual_consistency_reward(
      para("skin skin light light blur"), img, provider, 2);
  const double b = visual_consistency_reward(
      para("skin light skin light grain tone"), img, provider, 2);
  CHECK(a == b);
}

TEST_CASE("prediction_consistency_reward spec examples") {
  // labels [fake, fake, real], final fake -> majority fake -> all ones
  CHECK(prediction_consistency_reward(make_transcript({0, 1, 4}, Label::Fake), lex()) ==
        std::vector<double>({1.0, 1.0, 1.0, 1.0}));
  // same labels, final real -> final paragraph reward 0
  CHECK(prediction_consistency_reward(make_transcript({0, 1, 4}, Label::Real), lex()) ==
        std::vector<double>({1.0, 1.0, 1.0, 0.0}));
  // final paragraph only: tie resolves toward the final answer
  CHECK(prediction_consistency_reward(segment_transcript("Final Answer: fake"), lex()) ==
        std::vector<double>({1.0}));
}

TEST_CASE("prediction_consistency_reward matches the majority oracle") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<int> ids;
    for (int i = 0; i < n; ++i) ids.push_back(static_cast<int>(rng() % sentence_bank().size()));
    const Label final_answer = (rng() % 2) ? Label::Fake : Label::Real;
    CHECK(prediction_consistency_reward(make_transcript(ids, final_answer), lex()) ==
          pcr_oracle(ids, final_answer));
  }
}

TEST_CASE("combined_reward arithmetic and range checks") {
  CHECK(combined_reward(0.8, 1.0) == 0.9);
  CHECK(combined_reward(0.0, 0.0) == 0.0);
  CHECK(combined_reward(1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(combined_reward(-0.1, 1.0), DomainError);
  CHECK_THROWS_AS(combined_reward(1.1, 0.0), DomainError);
  CHECK_THROWS_AS(combined_reward(0.5, 0.5), DomainError);
}

TEST_CASE("group_advantages spec examples") {
  const auto zeros = group_advantages({{1, 1}, {1}}, 1e-8);
  REQUIRE(zeros.size() == 2);
  CHECK(zeros[0] == std::vector<double>({0.0, 0.0}));
  CHECK(zeros[1] == std::vector<double>({0.0}));

  const auto pm = group_advantages({{0.0}, {1.0}}, 1e-8);
  CHECK(pm[0][0] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(pm[1][0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("group_advantages centering and scale") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> rewards(1 + rng() % 8);
    double max_abs = 0.0;
    std::size_t n = 0;
    for (auto& out : rewards) {
      out.resize(1 + rng() % 6);
      for (auto& r : out) r = uni(rng);
      n += out.size();
    }
    const auto adv = group_advantages(rewards, 1e-8);
    double sum = 0.0;
    for (const auto& out : adv)
      for (double a : out) {
        sum += a;
        max_abs = std::max(max_abs, std::abs(a));
      }
    CHECK(std::abs(sum) <= 1e-9 * static_cast<double>(n) * std::max(1.0, max_abs));

    // population std of the outputs is sigma/(sigma+eps) when sigma > 0
    double mean_r = 0.0;
    for (const auto& out : rewards)
      for (double r : out) mean_r += r;
    mean_r /= static_cast<double>(n);
    double var_r = 0.0;
    for (const auto& out : rewards)
      for (double r : out) var_r += (r - mean_r) * (r - mean_r);
    const double sigma = std::sqrt(var_r / static_cast<double>(n));
    if (sigma > 0) {
      double var_a = 0.0;
      for (const auto& out : adv)
        for (double a : out) var_a += a * a;  // advantages are centered
      const double std_a = std::sqrt(var_a / static_cast<double>(n));
      CHECK(std_a == doctest::Approx(sigma / (sigma + 1e-8)).epsilon(1e-6));
    }
  }
}

TEST_CASE("group_advantages commutes with permuting the outputs") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> rewards(2 + rng() % 5);
    for (auto& out : rewards) {
      out.resize(1 + rng() % 4);
      for (auto& r : out) r = uni(rng);
    }
    std::vector<std::size_t> perm(rewards.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<std::vector<double>> permuted(rewards.size());
    for (std::size_t i = 0; i < perm.size(); ++i) permuted[i] = rewards[perm[i]];

    const auto adv = group_advantages(rewards, 1e-8);
    const auto adv_permuted = group_advantages(permuted, 1e-8);
    // identical up to summation-order rounding in the moments
    for (std::size_t i = 0; i < perm.size(); ++i) {
      REQUIRE(adv_permuted[i].size() == adv[perm[i]].size());
      for (std::size_t j = 0; j < adv_permuted[i].size(); ++j)
        CHECK(adv_permuted[i][j] ==
              doctest::Approx(adv[perm[i]][j]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("group_advantages validation") {
  CHECK_THROWS_AS(group_advantages({}, 1e-8), DomainError);
  CHECK_THROWS_AS(group_advantages({{}}, 1e-8), DomainError);
  CHECK_THROWS_AS(group_advantages({{1.0}}, 0.0), DomainError);
}

TEST_CASE("score_group ties the pieces together") {
  const ReferenceEmbeddingProvider provider(64);
  const ImageDescriptor img{"img", {"skin", "texture"}, std::nullopt};
  const std::vector<Transcript> outputs = {
      make_transcript({0, 4}, Label::Fake),
      make_transcript({1}, Label::Fake),
  };
  const auto breakdown = score_group(outputs, img, lex(), provider, 5, 1e-8);
  REQUIRE(breakdown.size() == 2);
  REQUIRE(breakdown[0].size() == 3);
  REQUIRE(breakdown[1].size() == 2);
  double adv_sum = 0.0;
  for (const auto& out : breakdown)
    for (const auto& b : out) {
      CHECK(b.combined == (b.vcr + b.pcr) / 2.0);
      CHECK(b.vcr >= 0.0);
      CHECK(b.vcr <= 1.0);
      CHECK((b.pcr == 0.0 || b.pcr == 1.0));
      adv_sum += b.advantage;
    }
  CHECK(std::abs(adv_sum) < 1e-9);
}
