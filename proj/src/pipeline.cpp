#include "prpo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "prpo/errors.hpp"
#include "prpo/text.hpp"

namespace prpo {

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Clients

std::string ScriptedMockClient::prompt_hash(const std::string& prompt) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(prompt)));
  return std::string(buf);
}

void ScriptedMockClient::add(const std::string& prompt, const std::string& response) {
  responses_[prompt_hash(prompt)] = response;
}

void ScriptedMockClient::add_by_hash(const std::string& prompt_hash_hex,
                                     const std::string& response) {
  responses_[prompt_hash_hex] = response;
}

ScriptedMockClient ScriptedMockClient::from_json_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedJson(std::string("mock responses: ") + e.what());
  }
  if (!j.is_object()) throw SchemaViolation("mock responses: expected an object");
  ScriptedMockClient client;
  for (auto& [key, value] : j.items()) {
    if (!value.is_string())
      throw SchemaViolation("mock responses: value for '" + key + "' is not a string");
    client.responses_[key] = value.get<std::string>();
  }
  return client;
}

ScriptedMockClient ScriptedMockClient::load(const std::string& path) {
  return from_json_text(read_file_or_throw(path));
}

std::string ScriptedMockClient::complete(const std::string& prompt) {
  ++calls_;
  const std::string key = prompt_hash(prompt);
  auto it = responses_.find(key);
  if (it == responses_.end())
    throw ProviderFailure("mock client has no response for prompt hash " + key);
  return it->second;
}

ChatClientConfig parse_chat_client_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedJson(std::string("client config: ") + e.what());
  }
  ChatClientConfig cfg;
  if (j.contains("backend")) cfg.backend = j["backend"].get<std::string>();
  if (j.contains("endpoint")) cfg.endpoint = j["endpoint"].get<std::string>();
  if (j.contains("auth_token_env")) cfg.auth_token_env = j["auth_token_env"].get<std::string>();
  if (j.contains("responses")) cfg.responses_path = j["responses"].get<std::string>();
  if (j.contains("timeout_ms")) cfg.timeout_ms = j["timeout_ms"].get<int>();
  if (j.contains("max_retries")) cfg.max_retries = j["max_retries"].get<int>();
  if (j.contains("parallelism")) cfg.parallelism = j["parallelism"].get<int>();
  if (cfg.timeout_ms <= 0) throw ConfigError("timeout_ms", "must be > 0");
  if (cfg.max_retries < 0) throw ConfigError("max_retries", "must be >= 0");
  if (cfg.parallelism < 1) throw ConfigError("parallelism", "must be >= 1");
  if (cfg.backend != "mock" && cfg.backend != "remote")
    throw ConfigError("backend", "must be 'mock' or 'remote'");
  if (cfg.backend == "remote" && cfg.endpoint.empty())
    throw ConfigError("endpoint", "required for the remote backend");
  return cfg;
}

std::unique_ptr<ChatClient> make_chat_client(const ChatClientConfig& cfg) {
  if (cfg.backend == "mock") {
    auto client = std::make_unique<ScriptedMockClient>();
    if (!cfg.responses_path.empty())
      *client = ScriptedMockClient::load(cfg.responses_path);
    return client;
  }
  return std::make_unique<RemoteChatClient>(cfg);
}

RemoteChatClient::RemoteChatClient(ChatClientConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) throw ConfigError("endpoint", "must not be empty");
}

std::string RemoteChatClient::complete(const std::string& prompt) {
  auto scheme_end = cfg_.endpoint.find("://");
  std::size_t path_start =
      cfg_.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string base =
      path_start == std::string::npos ? cfg_.endpoint : cfg_.endpoint.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);

  nlohmann::json body;
  body["prompt"] = prompt;

  httplib::Headers headers;
  if (!cfg_.auth_token_env.empty()) {
    if (const char* token = std::getenv(cfg_.auth_token_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
    httplib::Client client(base);
    client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
    client.set_read_timeout(0, cfg_.timeout_ms * 1000);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      if (j.contains("completion") && j["completion"].is_string())
        return j["completion"].get<std::string>();
      last_error = "response lacks 'completion'";
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad response body: ") + e.what();
    }
  }
  throw ProviderFailure("chat request to " + cfg_.endpoint + " failed after " +
                        std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// Step 1: feature discovery

namespace {

constexpr const char* kDiscoveryTemplate =
    R"(Generate a list of {K} distinct and commonly observed visual characteristics that can help identify deepfake facial images.

Each characteristic should be:
- Clearly indicative of potential manipulation or digital forgery,
- Concise, unambiguous, and non-redundant,
- Focused on detectable artifacts, inconsistencies, or unnatural details in facial structure, texture, lighting, or surrounding context.
- Avoid repetition, each characteristic must describe a completely different phenomenon or cue.

Avoid general statements and ensure each characteristic highlights a unique visual cue that can be evaluated from a static image.
List them in bullet or numbered format.)";

constexpr const char* kConsolidationTemplate =
    R"(You are provided with a list of the top {K}x4={TOTAL} common forensic-relevant features used to detect forgery in facial images, as analyzed by state-of-the-art large language models, including GPT-4o, Gemini 2.5 Flash, Qwen 2.5-Max, and LLaMA 4 Maverick.

Your task is to:
1. Combine all {K}x4={TOTAL} features across these models into a single unified list.
2. Eliminate duplicate or overlapping features to ensure clarity and uniqueness.
3. Ensure each feature:
   - Is clearly defined and focused on detecting forgery in visual facial content.
   - Reflects diversity across models but avoids any redundancy.
   - Maintains precise and non-ambiguous language.

Output format:
A final list of unique and consolidated features, each on a separate line, numbered from 1 to N.

The provided features are:

GPT-4o: {features_gpt}

Gemini 2.5: {features_gemini}

Qwen 2.5: {features_qwen}

LLaMA 4: {features_llama})";

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string build_feature_discovery_prompt(std::size_t K) {
  if (K < 1) throw DomainError("build_feature_discovery_prompt: K must be >= 1");
  return replace_all(kDiscoveryTemplate, "{K}", std::to_string(K));
}

std::string build_consolidation_prompt(
    const std::map<std::string, std::vector<std::string>>& features_by_model) {
  static const std::vector<std::string> kModels = {"gpt", "gemini", "qwen", "llama"};
  if (features_by_model.size() != 4)
    throw ArityError("build_consolidation_prompt: expected exactly four feature lists, got " +
                     std::to_string(features_by_model.size()));
  for (const auto& m : kModels) {
    if (!features_by_model.count(m))
      throw ArityError("build_consolidation_prompt: missing feature list '" + m + "'");
  }

  std::size_t total = 0;
  for (const auto& [name, list] : features_by_model) total += list.size();
  const std::size_t per_model = features_by_model.at("gpt").size();

  std::string out = kConsolidationTemplate;
  out = replace_all(out, "{K}", std::to_string(per_model));
  out = replace_all(out, "{TOTAL}", std::to_string(total));
  out = replace_all(out, "{features_gpt}", join(features_by_model.at("gpt"), "; "));
  out = replace_all(out, "{features_gemini}", join(features_by_model.at("gemini"), "; "));
  out = replace_all(out, "{features_qwen}", join(features_by_model.at("qwen"), "; "));
  out = replace_all(out, "{features_llama}", join(features_by_model.at("llama"), "; "));
  return out;
}

std::vector<std::string> dedup_features(const std::vector<std::string>& features) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (seen.insert(to_lower(trim(f))).second) out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Step 2: feature scoring

namespace {

constexpr const char* kScoringTemplate =
    R"(Given the attached image, evaluate each of the {k} listed deepfake characteristics. For each characteristic, respond with:
- Real (-1) if the characteristic appears natural,
- Fake (+1) if the characteristic clearly indicates digital forgery or manipulation,
- Uncertain (0) if the characteristic cannot be clearly evaluated from the provided image.

Provide your answers in the following format:
{feature 1: <score>},
{feature 2: <score>},
 ...
{feature {k}: <score>}.

Finally, based on your evaluation, provide your overall judgment clearly as:
Final Answer: <real/fake>

Note that your score of each feature should be fair, independent marking without bias.

The {k} characteristics are:
{feature_list})";

}  // namespace

std::string build_scoring_prompt(const std::vector<std::string>& features) {
  if (features.empty()) throw DomainError("build_scoring_prompt: features must be non-empty");
  std::string list;
  for (std::size_t i = 0; i < features.size(); ++i)
    list += std::to_string(i + 1) + ". " + features[i] + "\n";
  list.pop_back();
  std::string out = kScoringTemplate;
  out = replace_all(out, "{k}", std::to_string(features.size()));
  out = replace_all(out, "{feature_list}", list);
  return out;
}

std::string render_feature_scores(const std::vector<FeatureScore>& scores,
                                  Label final_answer) {
  std::string out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int s = scores[i].score;
    out += "{feature " + std::to_string(scores[i].feature_index) + ": " +
           (s > 0 ? "+1" : s < 0 ? "-1" : "0") + "}";
    out += (i + 1 < scores.size()) ? ",\n" : ".\n";
  }
  out += "\nFinal Answer: " + to_string(final_answer);
  return out;
}

namespace {

const std::regex kScoreEntryRe(R"(\{\s*feature\s+(\d{1,9})\s*:\s*([^}]*?)\s*\})",
                               std::regex::icase);

int parse_score_value(const std::string& raw, int index) {
  if (raw == "0") return 0;
  if (raw == "+1" || raw == "1") return 1;
  if (raw == "-1") return -1;
  throw InvalidScore("feature " + std::to_string(index) + " has score '" + raw +
                     "' outside {-1, 0, +1}");
}

}  // namespace

std::pair<std::vector<FeatureScore>, Label> parse_feature_scores(const std::string& response,
                                                                 std::size_t k) {
  if (k < 1) throw DomainError("parse_feature_scores: k must be >= 1");

  std::map<int, int> by_index;
  for (auto it = std::sregex_iterator(response.begin(), response.end(), kScoreEntryRe);
       it != std::sregex_iterator(); ++it) {
    const int index = std::stoi((*it)[1].str());
    const int value = parse_score_value((*it)[2].str(), index);
    by_index.emplace(index, value);  // first occurrence wins
  }

  std::vector<FeatureScore> scores;
  scores.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    auto it = by_index.find(static_cast<int>(i));
    if (it == by_index.end())
      throw MissingScores("only " + std::to_string(by_index.size()) + " of " +
                          std::to_string(k) + " feature scores present (feature " +
                          std::to_string(i) + " missing)");
    scores.push_back({static_cast<int>(i), it->second});
  }

  const std::string lower = to_lower(response);
  const std::size_t pos = lower.rfind("final answer");
  if (pos == std::string::npos)
    throw MissingFinalAnswer("response has no 'Final Answer' line");
  for (const auto& tok : tokenize(lower.substr(pos + 12))) {
    if (tok == "real") return {std::move(scores), Label::Real};
    if (tok == "fake") return {std::move(scores), Label::Fake};
  }
  throw MissingFinalAnswer("'Final Answer' line names neither real nor fake");
}

std::string build_refinement_prompt(const std::vector<int>& flagged_indices,
                                    Label ground_truth) {
  if (flagged_indices.empty())
    throw DomainError("build_refinement_prompt: no flagged features");
  std::string list;
  for (std::size_t i = 0; i < flagged_indices.size(); ++i) {
    if (i) list += ", ";
    list += "feature " + std::to_string(flagged_indices[i]);
  }
  std::string out =
      R"(Re-evaluate the following previously uncertain or incorrect deepfake characteristics for the attached image.
The ground truth label for this image is: {label}.
For each listed feature, respond in the format {feature i: <score>} keeping the original feature numbering, with Real (-1), Fake (+1), or Uncertain (0).

Features to re-evaluate: {features})";
  out = replace_all(out, "{label}", to_string(ground_truth));
  out = replace_all(out, "{features}", list);
  return out;
}

std::vector<FeatureScore> refine_uncertain(const std::vector<FeatureScore>& scores,
                                           Label ground_truth, ChatClient& client,
                                           std::size_t budget) {
  const int agree = ground_truth == Label::Fake ? 1 : -1;
  std::vector<FeatureScore> current = scores;

  for (std::size_t round = 0; round < budget; ++round) {
    std::vector<int> flagged;
    for (const auto& fs : current)
      if (fs.score != agree) flagged.push_back(fs.feature_index);
    if (flagged.empty()) break;

    const std::string response = client.complete(build_refinement_prompt(flagged, ground_truth));

    std::map<int, int> returned;
    for (auto it = std::sregex_iterator(response.begin(), response.end(), kScoreEntryRe);
         it != std::sregex_iterator(); ++it) {
      const int index = std::stoi((*it)[1].str());
      returned.emplace(index, parse_score_value((*it)[2].str(), index));
    }

    for (auto& fs : current) {
      if (fs.score == agree) continue;  // agreeing entries are immutable
      auto it = returned.find(fs.feature_index);
      if (it != returned.end()) fs.score = it->second;
    }
  }
  return current;
}

// ---------------------------------------------------------------------------
// Step 3: reasoning generation

namespace {

constexpr const char* kGroupingTemplate =
    R"(Analyze the provided image, which has {n_features} features which indicate that the image is {label}.

Your task is to first group these features into a maximum of {M} logical groups based on their conceptual similarity.
Then, for each group, provide a concise reasoning that explains what the features within that group collectively suggest about the authenticity of this specific image.
Instead of defining the features in general, describe what is notable or unusual (if the image is "fake") or typical (if the image is "real") about these features in the context of the image.

The features indicating the image is {label} are:
{feature_list}

The ground truth label for this image is: {label}

Please provide your analysis in JSON format following this exact structure:
{
  "groups": {
    "group_name_1": ["feature_name_a", "feature_name_b", ...],
    "group_name_2": ["feature_name_c", "feature_name_d", ...],
    ...
  },
  "group_name_1": "reasoning for group 1",
  "group_name_2": "reasoning for group 2",
  ...,
  "answer": "ground truth label"
})";

}  // namespace

std::string build_grouping_prompt(const std::vector<std::string>& features, Label label,
                                  std::size_t M) {
  if (features.empty()) throw DomainError("build_grouping_prompt: features must be non-empty");
  if (M < 1) throw DomainError("build_grouping_prompt: M must be >= 1");
  std::string list;
  for (const auto& f : features) list += "- " + f + "\n";
  list.pop_back();
  std::string out = kGroupingTemplate;
  out = replace_all(out, "{n_features}", std::to_string(features.size()));
  out = replace_all(out, "{M}", std::to_string(M));
  out = replace_all(out, "{label}", to_string(label));
  out = replace_all(out, "{feature_list}", list);
  return out;
}

ReasoningRecord parse_reasoning_record(const std::string& json_text, std::size_t M,
                                       const std::string& image_id) {
  if (M < 1) throw DomainError("parse_reasoning_record: M must be >= 1");

  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedJson(std::string("reasoning record: ") + e.what());
  }
  if (!j.is_object()) throw SchemaViolation("reasoning record: expected a JSON object");
  if (!j.contains("groups") || !j["groups"].is_object())
    throw SchemaViolation("reasoning record: missing 'groups' object");
  if (!j.contains("answer") || !j["answer"].is_string())
    throw SchemaViolation("reasoning record: missing 'answer' string");

  ReasoningRecord rec;
  rec.image_id = image_id;
  rec.answer = parse_label(j["answer"].get<std::string>());

  const auto& groups = j["groups"];
  if (groups.empty()) throw SchemaViolation("reasoning record: at least one group required");
  if (groups.size() > M)
    throw GroupBudgetExceeded("reasoning record: " + std::to_string(groups.size()) +
                              " groups exceed the budget of " + std::to_string(M));

  std::set<std::string> feature_seen;
  for (auto& [name, value] : groups.items()) {
    if (!value.is_array() || value.empty())
      throw SchemaViolation("reasoning record: group '" + name +
                            "' must be a non-empty feature array");
    std::vector<std::string> feats;
    for (const auto& f : value) {
      if (!f.is_string() || f.get<std::string>().empty())
        throw SchemaViolation("reasoning record: group '" + name +
                              "' contains a non-string feature");
      const std::string feat = f.get<std::string>();
      if (!feature_seen.insert(feat).second)
        throw SchemaViolation("reasoning record: feature '" + feat +
                              "' appears more than once");
      feats.push_back(feat);
    }
    rec.groups.emplace_back(name, std::move(feats));
  }

  for (const auto& [name, feats] : rec.groups) {
    if (!j.contains(name) || !j[name].is_string())
      throw SchemaViolation("reasoning record: missing reasoning for group '" + name + "'");
    rec.reasonings[name] = j[name].get<std::string>();
  }

  for (auto& [key, value] : j.items()) {
    if (key == "groups" || key == "answer") continue;
    if (!rec.reasonings.count(key))
      throw SchemaViolation("reasoning record: unexpected key '" + key + "'");
  }
  return rec;
}

std::string render_reasoning_record(const ReasoningRecord& rec) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json groups;
  for (const auto& [name, feats] : rec.groups) groups[name] = feats;
  j["groups"] = groups;
  for (const auto& [name, feats] : rec.groups) j[name] = rec.reasonings.at(name);
  j["answer"] = to_string(rec.answer);
  return j.dump(2);
}

std::string ReasoningRecord::to_transcript_text() const {
  std::string out;
  for (const auto& [name, feats] : groups) {
    out += reasonings.at(name);
    out += "\n\n";
  }
  out += "Final Answer: " + to_string(answer);
  return out;
}

// ---------------------------------------------------------------------------
// Corpus statistics

std::map<std::string, CategoryStat> feature_category_stats(
    const std::vector<ReasoningRecord>& records,
    const std::map<std::string, std::string>& category_map) {
  std::map<std::string, CategoryStat> stats;
  std::size_t total = 0;
  for (const auto& rec : records) {
    for (const auto& [name, feats] : rec.groups) {
      for (const auto& feat : feats) {
        auto it = category_map.find(feat);
        if (it == category_map.end())
          throw UnmappedFeature("feature '" + feat + "' has no category mapping");
        ++stats[it->second].count;
        ++total;
      }
    }
  }
  for (auto& [cat, stat] : stats)
    stat.percent = 100.0 * static_cast<double>(stat.count) / static_cast<double>(total);
  return stats;
}

}  // namespace prpo
