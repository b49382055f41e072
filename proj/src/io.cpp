#include "prpo/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prpo/errors.hpp"

namespace prpo {

namespace {

// Applies fn to every non-empty line, converting parse problems into
// MalformedJsonl with a 1-based line number.
template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedJsonl(path, lineno, e.what());
    }
    try {
      fn(j);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedJsonl(path, lineno, e.what());
    } catch (const DataError& e) {
      throw MalformedJsonl(path, lineno, e.what());
    }
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write file: " + path);
  out << content;
  if (!out) throw FileError("write failed: " + path);
}

std::vector<TranscriptRecord> read_transcript_records(const std::string& path) {
  std::vector<TranscriptRecord> records;
  for_each_jsonl(path, [&](const nlohmann::json& j) {
    TranscriptRecord rec;
    if (!j.contains("id") || !j["id"].is_string())
      throw SchemaViolation("transcript record needs a string 'id'");
    if (!j.contains("raw") || !j["raw"].is_string())
      throw SchemaViolation("transcript record needs a string 'raw'");
    rec.id = j["id"].get<std::string>();
    rec.raw = j["raw"].get<std::string>();
    if (j.contains("ground_truth"))
      rec.ground_truth = parse_label(j["ground_truth"].get<std::string>());
    if (j.contains("image_id")) rec.image_id = j["image_id"].get<std::string>();
    records.push_back(std::move(rec));
  });
  return records;
}

std::vector<ImageDescriptor> read_image_descriptors(const std::string& path) {
  std::vector<ImageDescriptor> images;
  for_each_jsonl(path, [&](const nlohmann::json& j) {
    ImageDescriptor img;
    if (!j.contains("id") || !j["id"].is_string())
      throw SchemaViolation("image record needs a string 'id'");
    img.id = j["id"].get<std::string>();
    if (j.contains("tags")) img.tags = j["tags"].get<std::vector<std::string>>();
    if (j.contains("external_ref")) img.external_ref = j["external_ref"].get<std::string>();
    if (img.tags.empty() && !img.external_ref)
      throw SchemaViolation("image record needs tags or an external_ref");
    images.push_back(std::move(img));
  });
  return images;
}

std::string to_jsonl_line(const ParagraphRewardRecord& rec) {
  nlohmann::ordered_json j;
  j["transcript_id"] = rec.transcript_id;
  j["paragraph_index"] = rec.paragraph_index;
  j["vcr"] = rec.reward.vcr;
  j["pcr"] = rec.reward.pcr;
  j["combined"] = rec.reward.combined;
  j["advantage"] = rec.reward.advantage;
  return j.dump();
}

std::vector<ParagraphRewardRecord> read_reward_records(const std::string& path) {
  std::vector<ParagraphRewardRecord> records;
  for_each_jsonl(path, [&](const nlohmann::json& j) {
    ParagraphRewardRecord rec;
    rec.transcript_id = j.at("transcript_id").get<std::string>();
    rec.paragraph_index = j.at("paragraph_index").get<std::size_t>();
    rec.reward.vcr = j.at("vcr").get<double>();
    rec.reward.pcr = j.at("pcr").get<double>();
    rec.reward.combined = j.at("combined").get<double>();
    rec.reward.advantage = j.at("advantage").get<double>();
    records.push_back(std::move(rec));
  });
  return records;
}

std::vector<JudgeBatchRecord> read_judge_batch(const std::string& path) {
  std::vector<JudgeBatchRecord> batch;
  for_each_jsonl(path, [&](const nlohmann::json& j) {
    JudgeBatchRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.response = j.at("response").get<std::string>();
    rec.prediction = parse_label(j.at("prediction").get<std::string>());
    rec.ground_truth = parse_label(j.at("ground_truth").get<std::string>());
    batch.push_back(std::move(rec));
  });
  return batch;
}

std::string to_jsonl_line(const JudgeBatchResult& res) {
  nlohmann::ordered_json j;
  j["id"] = res.id;
  j["classification_accuracy"] = res.scores.cac;
  j["evidence_grounding"] = res.scores.egia;
  j["reasoning_quality"] = res.scores.rq;
  j["confidence_calibration"] = res.scores.cc;
  j["clarity_usefulness"] = res.scores.cu;
  j["justification"] = res.scores.justification;
  j["overall"] = res.scores.overall;
  return j.dump();
}

std::string metrics_to_json(const DetectionMetrics& m, const ConfusionCounts& c) {
  nlohmann::ordered_json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["counts"] = {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
  return j.dump(2);
}

}  // namespace prpo
