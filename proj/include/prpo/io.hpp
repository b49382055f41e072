#ifndef PRPO_IO_HPP
#define PRPO_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "prpo/embedding.hpp"
#include "prpo/evalmetrics.hpp"
#include "prpo/label.hpp"
#include "prpo/rewards.hpp"

namespace prpo {

struct TranscriptRecord {
  std::string id;
  std::string raw;
  std::optional<Label> ground_truth;
  std::optional<std::string> image_id;  // defaults to id when pairing with images
};

struct ParagraphRewardRecord {
  std::string transcript_id;
  std::size_t paragraph_index = 0;
  RewardBreakdown reward;
};

std::string read_file(const std::string& path);           // FileError if unreadable
void write_file(const std::string& path, const std::string& content);

std::vector<TranscriptRecord> read_transcript_records(const std::string& path);
std::vector<ImageDescriptor> read_image_descriptors(const std::string& path);

std::string to_jsonl_line(const ParagraphRewardRecord& rec);
std::vector<ParagraphRewardRecord> read_reward_records(const std::string& path);

std::vector<JudgeBatchRecord> read_judge_batch(const std::string& path);
std::string to_jsonl_line(const JudgeBatchResult& res);

std::string metrics_to_json(const DetectionMetrics& m, const ConfusionCounts& c);

}  // namespace prpo

#endif
