"""Smoke tests for the python bindings."""

import math

import pytest

import prpo


def test_segment_and_final_answer():
    t = prpo.segment_transcript("A.\n\nB.\n\nFinal Answer: fake")
    assert len(t.paragraphs) == 3
    assert t.paragraphs[2].is_final
    lex = prpo.Lexicon.defaults()
    assert prpo.extract_final_answer(t, lex) == prpo.Label.Fake


def test_segment_rejects_whitespace():
    with pytest.raises(prpo.PrpoError):
        prpo.segment_transcript("   \n\n  ")


def test_lexicon_scoring():
    lex = prpo.Lexicon.defaults()
    assert prpo.score_text("The skin texture looks unnatural and overly smooth.", lex) == (0, 2)
    assert prpo.score_text("There is no inconsistent lighting; shadows look natural.", lex) == (2, 0)
    assert prpo.predict_label(0, 0) == prpo.Label.Real
    assert prpo.predict_label(1, 3) == prpo.Label.Fake


def test_keywords_and_embeddings():
    assert prpo.extract_keywords("skin skin unnatural", k=1) == ["skin"]
    v1 = prpo.reference_embedding(["skin", "pore"], dim=64)
    v2 = prpo.reference_embedding(["pore", "skin"], dim=64)
    assert v1 == v2
    assert math.isclose(sum(x * x for x in v1), 1.0, rel_tol=1e-12)
    assert prpo.cosine_similarity(v1, v2) == 1.0


def test_rewards():
    provider = prpo.ReferenceEmbeddingProvider(dim=64)
    img = prpo.ImageDescriptor("img", ["skin", "pore", "edge"])
    assert prpo.visual_consistency_reward("skin pore edge", img, provider) == 1.0

    t = prpo.segment_transcript(
        "The skin texture looks unnatural and overly smooth.\n\nFinal Answer: fake")
    lex = prpo.Lexicon.defaults()
    assert prpo.prediction_consistency_reward(t, lex) == [1.0, 1.0]

    assert prpo.combined_reward(0.8, 1.0) == 0.9


def test_advantages_and_surrogate():
    adv = prpo.group_advantages([[0.0], [1.0]])
    assert math.isclose(adv[0][0], -1.0, rel_tol=1e-6)
    assert math.isclose(adv[1][0], 1.0, rel_tol=1e-6)

    lp_half = math.log(0.5)
    assert math.isclose(
        prpo.prpo_surrogate([[lp_half]], [[lp_half]], [[2.0]], 0.2), 2.0, rel_tol=1e-12)
    assert prpo.kl_penalty([[-1.0]], [[-1.0]]) == 0.0
    assert math.isclose(prpo.total_objective(1.0, 0.2, 0.01), 0.998, rel_tol=1e-12)


def test_toy_training_improves_the_grounded_paragraph():
    policy = prpo.ToyPolicy(
        ["The skin texture looks unnatural with a waxy shine.",
         "The background chair sits near a window curtain."],
        ["Final Answer: fake", "Final Answer: real"],
        1)
    cfg = prpo.PrpoConfig()
    cfg.iterations = 50
    cfg.seed = 7
    ctx = prpo.PromptContext(
        "p0", prpo.ImageDescriptor("img", ["skin", "texture", "unnatural", "waxy", "shine"]))
    report = prpo.train(policy, [ctx], cfg, prpo.Lexicon.defaults(),
                        prpo.ReferenceEmbeddingProvider(dim=64))
    assert len(report.iterations) == 50
    probs = policy.row_probs(0)
    assert probs[0] > 0.5  # the grounded candidate dominates


def test_pipeline_prompts_and_parsing():
    prompt = prpo.build_feature_discovery_prompt(50)
    assert "50 distinct and commonly observed" in prompt

    scores, label = prpo.parse_feature_scores(
        "{feature 1: -1}, {feature 2: +1}. Final Answer: fake", 2)
    assert scores == [(1, -1), (2, 1)]
    assert label == prpo.Label.Fake


def test_metrics():
    m = prpo.detection_metrics(3, 1, 5, 1)
    assert math.isclose(m["accuracy"], 0.8)
    assert math.isclose(m["f1"], 0.75)

    scores = prpo.parse_judge_scores(
        '{"classification_accuracy": 4, "evidence_grounding": 5, "reasoning_quality": 4,'
        ' "confidence_calibration": 4, "clarity_usefulness": 5, "justification": "ok"}')
    assert math.isclose(scores["overall"], 4.4)
