#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prpo/embedding.hpp"
#include "prpo/errors.hpp"
#include "prpo/evalmetrics.hpp"
#include "prpo/keywords.hpp"
#include "prpo/lexicon.hpp"
#include "prpo/pipeline.hpp"
#include "prpo/policy.hpp"
#include "prpo/rewards.hpp"
#include "prpo/transcript.hpp"

namespace py = pybind11;
using namespace prpo;

namespace {

py::dict metrics_dict(const DetectionMetrics& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Paragraph-level relative policy optimization core";

  py::register_exception<Error>(m, "PrpoError");

  py::enum_<Label>(m, "Label")
      .value("Real", Label::Real)
      .value("Fake", Label::Fake);

  py::class_<Paragraph>(m, "Paragraph")
      .def_readonly("index", &Paragraph::index)
      .def_readonly("text", &Paragraph::text)
      .def_readonly("is_final", &Paragraph::is_final);

  py::class_<Transcript>(m, "Transcript")
      .def_readonly("paragraphs", &Transcript::paragraphs)
      .def_readonly("raw", &Transcript::raw);

  m.def("segment_transcript", &segment_transcript, py::arg("raw"));

  py::class_<Lexicon>(m, "Lexicon")
      .def(py::init<std::vector<std::string>, std::vector<std::string>,
                    std::vector<std::string>>(),
           py::arg("fake_terms"), py::arg("real_terms"), py::arg("negation_terms"))
      .def_static("defaults", &Lexicon::defaults)
      .def_static("load", &Lexicon::load, py::arg("path"));

  m.def("score_text", [](const std::string& text, const Lexicon& lex) {
    const auto s = score_text(text, lex);
    return py::make_tuple(s.s_real, s.s_fake);
  });
  m.def("predict_label", [](int s_real, int s_fake) {
    return predict_label(LabelScore{s_real, s_fake});
  });
  m.def("extract_final_answer", [](const Transcript& t, const Lexicon& lex) {
    return extract_final_answer(t, lex);
  });

  m.def("extract_keywords",
        [](const std::string& text, std::size_t k) { return extract_keywords(text, k); },
        py::arg("text"), py::arg("k") = 5);
  m.def("reference_embedding", &reference_embedding, py::arg("tokens"), py::arg("dim") = 256);
  m.def("cosine_similarity", &cosine_similarity);

  py::class_<ImageDescriptor>(m, "ImageDescriptor")
      .def(py::init([](std::string id, std::vector<std::string> tags) {
             return ImageDescriptor{std::move(id), std::move(tags), std::nullopt};
           }),
           py::arg("id"), py::arg("tags"))
      .def_readwrite("id", &ImageDescriptor::id)
      .def_readwrite("tags", &ImageDescriptor::tags);

  py::class_<EmbeddingProvider>(m, "EmbeddingProvider");
  py::class_<ReferenceEmbeddingProvider, EmbeddingProvider>(m, "ReferenceEmbeddingProvider")
      .def(py::init<std::size_t>(), py::arg("dim") = 256)
      .def("dim", &ReferenceEmbeddingProvider::dim)
      .def("embed_text", &ReferenceEmbeddingProvider::embed_text)
      .def("embed_image", &ReferenceEmbeddingProvider::embed_image);

  m.def("visual_consistency_reward",
        [](const std::string& paragraph_text, const ImageDescriptor& img,
           const EmbeddingProvider& provider, std::size_t k) {
          Paragraph p{0, paragraph_text, false};
          return visual_consistency_reward(p, img, provider, k);
        },
        py::arg("paragraph_text"), py::arg("image"), py::arg("provider"), py::arg("k") = 5);
  m.def("prediction_consistency_reward",
        [](const Transcript& t, const Lexicon& lex) {
          return prediction_consistency_reward(t, lex);
        });
  m.def("combined_reward", &combined_reward, py::arg("vcr"), py::arg("pcr"));
  m.def("group_advantages", &group_advantages, py::arg("rewards"), py::arg("eps") = 1e-8);

  py::class_<PrpoConfig>(m, "PrpoConfig")
      .def(py::init<>())
      .def_readwrite("group_size", &PrpoConfig::group_size)
      .def_readwrite("clip_eps", &PrpoConfig::clip_eps)
      .def_readwrite("beta", &PrpoConfig::beta)
      .def_readwrite("adv_eps", &PrpoConfig::adv_eps)
      .def_readwrite("learning_rate", &PrpoConfig::learning_rate)
      .def_readwrite("iterations", &PrpoConfig::iterations)
      .def_readwrite("seed", &PrpoConfig::seed)
      .def_readwrite("keyword_k", &PrpoConfig::keyword_k)
      .def_readwrite("mean_normalize_surrogate", &PrpoConfig::mean_normalize_surrogate)
      .def("validate", &PrpoConfig::validate);

  py::class_<PromptContext>(m, "PromptContext")
      .def(py::init([](std::string prompt_id, ImageDescriptor image) {
             return PromptContext{std::move(prompt_id), std::move(image)};
           }),
           py::arg("prompt_id"), py::arg("image"))
      .def_readwrite("prompt_id", &PromptContext::prompt_id)
      .def_readwrite("image", &PromptContext::image);

  py::class_<ToyPolicy>(m, "ToyPolicy")
      .def(py::init<std::vector<std::string>, std::vector<std::string>, std::size_t>(),
           py::arg("reasoning_bank"), py::arg("final_bank"), py::arg("reasoning_slots"))
      .def("rows", &ToyPolicy::rows)
      .def("reasoning_slots", &ToyPolicy::reasoning_slots)
      .def("row_probs", &ToyPolicy::row_probs, py::arg("slot"))
      .def("log_prob", &ToyPolicy::log_prob, py::arg("slot"), py::arg("bank_index"))
      .def_property("logits",
                    [](const ToyPolicy& p) { return p.logits(); },
                    [](ToyPolicy& p, std::vector<std::vector<double>> v) {
                      if (v.size() != p.logits().size())
                        throw ShapeMismatch("logits row count differs");
                      for (std::size_t r = 0; r < v.size(); ++r)
                        if (v[r].size() != p.logits()[r].size())
                          throw ShapeMismatch("logits width differs");
                      p.logits() = std::move(v);
                    });

  py::class_<GroupSample>(m, "GroupSample")
      .def_readonly("outputs", &GroupSample::outputs)
      .def_readonly("choices", &GroupSample::choices)
      .def_readwrite("logp_old", &GroupSample::logp_old)
      .def_readwrite("logp_ref", &GroupSample::logp_ref)
      .def_readwrite("logp_new", &GroupSample::logp_new)
      .def_readwrite("rewards", &GroupSample::rewards)
      .def_readwrite("advantages", &GroupSample::advantages);

  m.def("paragraph_log_prob", &paragraph_log_prob);
  m.def("sample_group", &sample_group, py::arg("policy"), py::arg("context"),
        py::arg("config"), py::arg("seed"));
  m.def("group_log_probs", &group_log_probs);
  m.def("prpo_surrogate", &prpo_surrogate, py::arg("logp_new"), py::arg("logp_old"),
        py::arg("advantages"), py::arg("clip_eps") = 0.2);
  m.def("kl_penalty", &kl_penalty);
  m.def("total_objective", &total_objective);
  m.def("objective_gradient", &objective_gradient);
  m.def("combined_finetune_loss", &combined_finetune_loss, py::arg("lm_loss"),
        py::arg("binary_loss"), py::arg("alpha"));

  py::class_<IterationStats>(m, "IterationStats")
      .def_readonly("iter", &IterationStats::iter)
      .def_readonly("mean_reward", &IterationStats::mean_reward)
      .def_readonly("surrogate", &IterationStats::surrogate)
      .def_readonly("kl", &IterationStats::kl);

  py::class_<TrainingReport>(m, "TrainingReport")
      .def_readonly("iterations", &TrainingReport::iterations)
      .def_readonly("final_probs", &TrainingReport::final_probs)
      .def("to_json", &TrainingReport::to_json);

  m.def("train",
        [](ToyPolicy& policy, const std::vector<PromptContext>& contexts,
           const PrpoConfig& cfg, const Lexicon& lex, const EmbeddingProvider& provider) {
          return train(policy, contexts, cfg,
                       make_group_rewarder(lex, provider, cfg.keyword_k, cfg.adv_eps));
        },
        py::arg("policy"), py::arg("contexts"), py::arg("config"), py::arg("lexicon"),
        py::arg("provider"));

  m.def("detection_metrics", [](std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    return metrics_dict(detection_metrics(ConfusionCounts{tp, fp, tn, fn}));
  });
  m.def("eval_corpus", [](const std::vector<std::pair<std::string, Label>>& corpus,
                          const Lexicon& lex) {
    std::vector<std::pair<Transcript, Label>> parsed;
    parsed.reserve(corpus.size());
    for (const auto& [raw, truth] : corpus) parsed.emplace_back(segment_transcript(raw), truth);
    const auto counts = score_corpus(parsed, lex);
    auto d = metrics_dict(detection_metrics(counts));
    d["counts"] = py::make_tuple(counts.tp, counts.fp, counts.tn, counts.fn);
    return d;
  });

  m.def("build_feature_discovery_prompt", &build_feature_discovery_prompt, py::arg("K"));
  m.def("build_consolidation_prompt", &build_consolidation_prompt);
  m.def("build_scoring_prompt", &build_scoring_prompt);
  m.def("build_grouping_prompt", &build_grouping_prompt, py::arg("features"),
        py::arg("label"), py::arg("M"));
  m.def("parse_feature_scores", [](const std::string& response, std::size_t k) {
    const auto [scores, label] = parse_feature_scores(response, k);
    std::vector<std::pair<int, int>> flat;
    flat.reserve(scores.size());
    for (const auto& fs : scores) flat.emplace_back(fs.feature_index, fs.score);
    return py::make_tuple(flat, label);
  });
  m.def("build_judge_prompt", &build_judge_prompt);
  m.def("parse_judge_scores", [](const std::string& json_text) {
    const auto s = parse_judge_scores(json_text);
    py::dict d;
    d["classification_accuracy"] = s.cac;
    d["evidence_grounding"] = s.egia;
    d["reasoning_quality"] = s.rq;
    d["confidence_calibration"] = s.cc;
    d["clarity_usefulness"] = s.cu;
    d["justification"] = s.justification;
    d["overall"] = s.overall;
    return d;
  });
}
