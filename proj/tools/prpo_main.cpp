// Command-line front end: reward scoring, toy training, metric
// evaluation, judge batches, and the dataset-generation pipeline.
//
// Exit codes: 0 success, 1 data/config error, 2 environment/IO error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prpo/embedding.hpp"
#include "prpo/errors.hpp"
#include "prpo/evalmetrics.hpp"
#include "prpo/io.hpp"
#include "prpo/keywords.hpp"
#include "prpo/lexicon.hpp"
#include "prpo/pipeline.hpp"
#include "prpo/policy.hpp"
#include "prpo/rewards.hpp"
#include "prpo/transcript.hpp"

namespace {

using nlohmann::json;

prpo::Lexicon load_lexicon_or_default(const std::string& path) {
  return path.empty() ? prpo::Lexicon::defaults() : prpo::Lexicon::load(path);
}

json parse_json_file(const std::string& path) {
  const std::string text = prpo::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw prpo::MalformedJson(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// score

int cmd_score(const std::string& transcripts_path, const std::string& images_path,
              const std::string& lexicon_path, const std::string& out_path,
              std::size_t k, std::size_t dim, double adv_eps) {
  const auto records = prpo::read_transcript_records(transcripts_path);
  const auto images = prpo::read_image_descriptors(images_path);
  const prpo::Lexicon lex = load_lexicon_or_default(lexicon_path);
  const prpo::ReferenceEmbeddingProvider provider(dim);

  std::map<std::string, const prpo::ImageDescriptor*> by_id;
  for (const auto& img : images) by_id[img.id] = &img;

  // Transcripts sharing an image form one advantage-normalization group.
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string img_id = records[i].image_id.value_or(records[i].id);
    if (!by_id.count(img_id))
      throw prpo::DataError("transcript '" + records[i].id + "' references unknown image '" +
                            img_id + "'");
    if (!groups.count(img_id)) group_order.push_back(img_id);
    groups[img_id].push_back(i);
  }

  std::vector<std::vector<prpo::RewardBreakdown>> breakdown_by_record(records.size());
  for (const auto& img_id : group_order) {
    const auto& member_indices = groups[img_id];
    std::vector<prpo::Transcript> outputs;
    outputs.reserve(member_indices.size());
    for (std::size_t idx : member_indices) {
      try {
        outputs.push_back(prpo::segment_transcript(records[idx].raw));
      } catch (const prpo::EmptyTranscript&) {
        throw prpo::DataError("transcript '" + records[idx].id + "' is all whitespace");
      }
    }
    auto breakdown = prpo::score_group(outputs, *by_id.at(img_id), lex, provider, k, adv_eps);
    for (std::size_t m = 0; m < member_indices.size(); ++m)
      breakdown_by_record[member_indices[m]] = std::move(breakdown[m]);
  }

  std::ofstream out(out_path);
  if (!out) throw prpo::FileError("cannot write file: " + out_path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = 0; j < breakdown_by_record[i].size(); ++j) {
      out << prpo::to_jsonl_line({records[i].id, j, breakdown_by_record[i][j]}) << "\n";
    }
  }
  if (!out) throw prpo::FileError("write failed: " + out_path);
  std::cerr << "wrote rewards for " << records.size() << " transcripts to " << out_path
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const std::string& transcripts_path, const std::string& lexicon_path) {
  const auto records = prpo::read_transcript_records(transcripts_path);
  const prpo::Lexicon lex = load_lexicon_or_default(lexicon_path);

  std::vector<std::pair<prpo::Transcript, prpo::Label>> corpus;
  corpus.reserve(records.size());
  for (const auto& rec : records) {
    if (!rec.ground_truth)
      throw prpo::DataError("transcript '" + rec.id + "' lacks ground_truth");
    corpus.emplace_back(prpo::segment_transcript(rec.raw), *rec.ground_truth);
  }

  const auto counts = prpo::score_corpus(corpus, lex);
  std::cout << prpo::metrics_to_json(prpo::detection_metrics(counts), counts) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainSetup {
  prpo::PrpoConfig cfg;
  std::size_t embedding_dim = 64;
  std::string lexicon_path;
  std::vector<std::string> reasoning_bank;
  std::vector<std::string> final_bank;
  std::size_t slots = 1;
  std::vector<prpo::PromptContext> contexts;
};

TrainSetup parse_train_config(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_object()) throw prpo::ConfigError("<root>", "config must be a JSON object");

  static const std::vector<std::string> known = {
      "group_size",  "clip_eps",   "beta",        "adv_eps",
      "learning_rate", "iterations", "seed",      "keyword_k",
      "mean_normalize_surrogate",  "embedding_dim", "lexicon", "bank", "contexts"};
  for (auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw prpo::ConfigError(key, "unknown config key");
  }

  TrainSetup setup;
  auto& cfg = setup.cfg;
  try {
    if (j.contains("group_size")) cfg.group_size = j["group_size"].get<std::size_t>();
    if (j.contains("clip_eps")) cfg.clip_eps = j["clip_eps"].get<double>();
    if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
    if (j.contains("adv_eps")) cfg.adv_eps = j["adv_eps"].get<double>();
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("keyword_k")) cfg.keyword_k = j["keyword_k"].get<std::size_t>();
    if (j.contains("mean_normalize_surrogate"))
      cfg.mean_normalize_surrogate = j["mean_normalize_surrogate"].get<bool>();
    if (j.contains("embedding_dim")) setup.embedding_dim = j["embedding_dim"].get<std::size_t>();

    if (!j.contains("bank") || !j["bank"].is_object())
      throw prpo::ConfigError("bank", "required object with reasoning/final/slots");
    const auto& bank = j["bank"];
    setup.reasoning_bank = bank.at("reasoning").get<std::vector<std::string>>();
    setup.final_bank = bank.at("final").get<std::vector<std::string>>();
    if (bank.contains("slots")) setup.slots = bank["slots"].get<std::size_t>();

    if (!j.contains("contexts") || !j["contexts"].is_array() || j["contexts"].empty())
      throw prpo::ConfigError("contexts", "required non-empty array");
    for (const auto& c : j["contexts"]) {
      prpo::PromptContext ctx;
      ctx.prompt_id = c.at("prompt_id").get<std::string>();
      ctx.image.id = c.at("image").at("id").get<std::string>();
      if (c.at("image").contains("tags"))
        ctx.image.tags = c["image"]["tags"].get<std::vector<std::string>>();
      if (ctx.prompt_id.empty()) throw prpo::ConfigError("contexts", "prompt_id must be non-empty");
      setup.contexts.push_back(std::move(ctx));
    }
  } catch (const json::exception& e) {
    throw prpo::ConfigError("<parse>", e.what());
  }

  if (j.contains("lexicon")) {
    // Relative lexicon paths resolve against the config file.
    std::filesystem::path lex = j["lexicon"].get<std::string>();
    if (lex.is_relative()) lex = std::filesystem::path(path).parent_path() / lex;
    setup.lexicon_path = lex.string();
  }

  cfg.validate();
  if (setup.embedding_dim < 8) throw prpo::ConfigError("embedding_dim", "must be >= 8");
  return setup;
}

int cmd_train(const std::string& config_path, const std::string& out_path,
              const std::optional<std::uint64_t>& seed_override) {
  TrainSetup setup = parse_train_config(config_path);
  if (seed_override) setup.cfg.seed = *seed_override;

  const prpo::Lexicon lex = load_lexicon_or_default(setup.lexicon_path);
  const prpo::ReferenceEmbeddingProvider provider(setup.embedding_dim);

  prpo::ToyPolicy policy(setup.reasoning_bank, setup.final_bank, setup.slots);
  const auto rewarder = prpo::make_group_rewarder(lex, provider, setup.cfg.keyword_k,
                                                  setup.cfg.adv_eps);
  const auto report = prpo::train(policy, setup.contexts, setup.cfg, rewarder);

  prpo::write_file(out_path, report.to_json() + "\n");
  if (!report.iterations.empty()) {
    std::cerr << "trained " << report.iterations.size() << " iterations; mean reward "
              << report.iterations.front().mean_reward << " -> "
              << report.iterations.back().mean_reward << "\n";
  }
  std::cerr << "report written to " << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// judge

int cmd_judge(const std::string& in_path, const std::string& out_path,
              const std::string& client_config_path, int parallelism_override) {
  prpo::ChatClientConfig client_cfg;
  if (!client_config_path.empty())
    client_cfg = prpo::parse_chat_client_config(prpo::read_file(client_config_path));
  if (parallelism_override > 0) client_cfg.parallelism = parallelism_override;
  if (client_cfg.backend == "mock" && !client_cfg.responses_path.empty()) {
    std::filesystem::path p = client_cfg.responses_path;
    if (p.is_relative())
      p = std::filesystem::path(client_config_path).parent_path() / p;
    client_cfg.responses_path = p.string();
  }
  auto client = prpo::make_chat_client(client_cfg);

  const auto batch = prpo::read_judge_batch(in_path);
  const auto results = prpo::run_judge_batch(batch, *client);

  std::ofstream out(out_path);
  if (!out) throw prpo::FileError("cannot write file: " + out_path);
  for (const auto& res : results) out << prpo::to_jsonl_line(res) << "\n";
  std::cerr << "judged " << results.size() << " responses\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pipeline

std::vector<std::string> read_feature_list(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_array()) throw prpo::SchemaViolation(path + ": expected a JSON array of strings");
  return j.get<std::vector<std::string>>();
}

int cmd_pipeline_discover(std::size_t K) {
  std::cout << prpo::build_feature_discovery_prompt(K) << "\n";
  return 0;
}

int cmd_pipeline_consolidate(const std::string& features_path) {
  const json j = parse_json_file(features_path);
  if (!j.is_object())
    throw prpo::SchemaViolation(features_path + ": expected an object of four feature lists");
  std::map<std::string, std::vector<std::string>> lists;
  for (auto& [key, value] : j.items()) lists[key] = value.get<std::vector<std::string>>();
  std::cout << prpo::build_consolidation_prompt(lists) << "\n";
  return 0;
}

int cmd_pipeline_score_features(const std::string& features_path,
                                const std::string& response_path) {
  const auto features = read_feature_list(features_path);
  if (response_path.empty()) {
    std::cout << prpo::build_scoring_prompt(features) << "\n";
    return 0;
  }
  const auto [scores, label] =
      prpo::parse_feature_scores(prpo::read_file(response_path), features.size());
  json out;
  out["scores"] = json::array();
  for (const auto& fs : scores)
    out["scores"].push_back({{"feature_index", fs.feature_index}, {"score", fs.score}});
  out["final_answer"] = prpo::to_string(label);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_pipeline_group(const std::string& features_path, const std::string& label_text,
                       std::size_t M, const std::string& response_path,
                       const std::string& image_id) {
  const prpo::Label label = prpo::parse_label(label_text);
  if (response_path.empty()) {
    const auto features = read_feature_list(features_path);
    std::cout << prpo::build_grouping_prompt(features, label, M) << "\n";
    return 0;
  }
  const auto rec =
      prpo::parse_reasoning_record(prpo::read_file(response_path), M, image_id);
  json line = json::parse(prpo::render_reasoning_record(rec));
  line["image_id"] = rec.image_id;
  std::cout << line.dump() << "\n";
  return 0;
}

int cmd_pipeline_stats(const std::string& records_path, const std::string& categories_path,
                       std::size_t M) {
  const json cats = parse_json_file(categories_path);
  if (!cats.is_object())
    throw prpo::SchemaViolation(categories_path + ": expected an object feature -> category");
  std::map<std::string, std::string> category_map;
  for (auto& [key, value] : cats.items()) category_map[key] = value.get<std::string>();

  std::vector<prpo::ReasoningRecord> records;
  std::ifstream in(records_path);
  if (!in) throw prpo::FileError("cannot open file: " + records_path);
  std::string line;
  std::size_t lineno = 0;
  const std::size_t budget = M == 0 ? std::numeric_limits<std::size_t>::max() : M;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw prpo::MalformedJsonl(records_path, lineno, e.what());
    }
    std::string image_id = "line-" + std::to_string(lineno);
    if (j.contains("image_id")) {
      image_id = j["image_id"].get<std::string>();
      j.erase("image_id");
    }
    try {
      records.push_back(prpo::parse_reasoning_record(j.dump(), budget, image_id));
    } catch (const prpo::DataError& e) {
      throw prpo::MalformedJsonl(records_path, lineno, e.what());
    }
  }

  const auto stats = prpo::feature_category_stats(records, category_map);
  json out;
  double percent_total = 0.0;
  for (const auto& [cat, stat] : stats) {
    out[cat] = {{"count", stat.count}, {"percent", stat.percent}};
    percent_total += stat.percent;
  }
  std::cout << out.dump(2) << "\n";
  std::cerr << "records: " << records.size() << ", categories: " << stats.size()
            << ", percent total: " << percent_total << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paragraph-level relative policy optimization toolkit"};
  app.require_subcommand(1);

  // --- score ---
  auto* score = app.add_subcommand("score", "Per-paragraph rewards and advantages");
  std::string sc_transcripts, sc_images, sc_lexicon, sc_out;
  std::size_t sc_k = 5, sc_dim = 256;
  double sc_adv_eps = 1e-8;
  score->add_option("--transcripts", sc_transcripts, "Transcript JSONL")->required();
  score->add_option("--images", sc_images, "Image descriptor JSONL")->required();
  score->add_option("--lexicon", sc_lexicon, "Lexicon JSON (default: built-in)");
  score->add_option("--out", sc_out, "Output reward JSONL")->required();
  score->add_option("--k", sc_k, "Keywords per paragraph")->check(CLI::PositiveNumber);
  score->add_option("--dim", sc_dim, "Embedding dimension");
  score->add_option("--adv-eps", sc_adv_eps, "Advantage epsilon");

  // --- train ---
  auto* train = app.add_subcommand("train", "Toy-policy training loop");
  std::string tr_config, tr_out;
  std::optional<std::uint64_t> tr_seed;
  train->add_option("--config", tr_config, "Training config JSON")->required();
  train->add_option("--out", tr_out, "Output report JSON")->required();
  train->add_option("--seed", tr_seed, "Override the config seed");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "Detection metrics over a labeled corpus");
  std::string ev_transcripts, ev_lexicon;
  eval->add_option("--transcripts", ev_transcripts, "Transcript JSONL with ground_truth")
      ->required();
  eval->add_option("--lexicon", ev_lexicon, "Lexicon JSON (default: built-in)");

  // --- judge ---
  auto* judge = app.add_subcommand("judge", "Five-criteria explanation judging");
  std::string jd_in, jd_out, jd_client;
  int jd_parallelism = 0;
  judge->add_option("--in", jd_in, "Judge batch JSONL")->required();
  judge->add_option("--out", jd_out, "Scored output JSONL")->required();
  judge->add_option("--client", jd_client, "Chat client config JSON")->required();
  judge->add_option("--parallelism", jd_parallelism, "Override client parallelism");

  // --- pipeline ---
  auto* pipeline = app.add_subcommand("pipeline", "Dataset-generation prompts and parsing");
  pipeline->require_subcommand(1);

  auto* discover = pipeline->add_subcommand("discover", "Feature-discovery prompt");
  std::size_t pd_K = 50;
  discover->add_option("--K", pd_K, "Features per model")->required();

  auto* consolidate = pipeline->add_subcommand("consolidate", "Consolidation prompt");
  std::string pc_features;
  consolidate->add_option("--features", pc_features, "JSON object with gpt/gemini/qwen/llama lists")
      ->required();

  auto* score_features = pipeline->add_subcommand("score-features", "Scoring prompt or parse");
  std::string pf_features, pf_response;
  score_features->add_option("--features", pf_features, "JSON array of feature names")
      ->required();
  score_features->add_option("--parse", pf_response, "Parse a model response instead");

  auto* group = pipeline->add_subcommand("group", "Grouping prompt or parse");
  std::string pg_features, pg_label = "fake", pg_response, pg_image_id = "unknown";
  std::size_t pg_M = 7;
  group->add_option("--features", pg_features, "JSON array of feature names");
  group->add_option("--label", pg_label, "real or fake")->required();
  group->add_option("--M", pg_M, "Maximum group count");
  group->add_option("--parse", pg_response, "Parse a grouping response instead");
  group->add_option("--image-id", pg_image_id, "Image id for parsed records");

  auto* stats = pipeline->add_subcommand("stats", "Feature-category statistics");
  std::string ps_records, ps_categories;
  std::size_t ps_M = 0;
  stats->add_option("--records", ps_records, "ReasoningRecord JSONL")->required();
  stats->add_option("--categories", ps_categories, "Feature -> category JSON map")->required();
  stats->add_option("--M", ps_M, "Group budget to enforce (0 = unlimited)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (score->parsed())
      return cmd_score(sc_transcripts, sc_images, sc_lexicon, sc_out, sc_k, sc_dim, sc_adv_eps);
    if (train->parsed()) return cmd_train(tr_config, tr_out, tr_seed);
    if (eval->parsed()) return cmd_eval(ev_transcripts, ev_lexicon);
    if (judge->parsed()) return cmd_judge(jd_in, jd_out, jd_client, jd_parallelism);
    if (pipeline->parsed()) {
      if (discover->parsed()) return cmd_pipeline_discover(pd_K);
      if (consolidate->parsed()) return cmd_pipeline_consolidate(pc_features);
      if (score_features->parsed())
        return cmd_pipeline_score_features(pf_features, pf_response);
      if (group->parsed())
        return cmd_pipeline_group(pg_features, pg_label, pg_M, pg_response, pg_image_id);
      if (stats->parsed()) return cmd_pipeline_stats(ps_records, ps_categories, ps_M);
    }
  } catch (const prpo::EnvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const prpo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
