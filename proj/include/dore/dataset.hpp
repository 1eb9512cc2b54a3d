#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dore/relations.hpp"

namespace dore {

enum class Speaker { user, system };

const char* speaker_name(Speaker speaker);

struct DialogueTurn {
  Speaker speaker = Speaker::user;
  std::string utterance;
};

struct DialogueRecord {
  std::string dialogue_id;
  std::vector<DialogueTurn> turns;
  std::vector<std::string> terms;
  std::optional<std::vector<RelationTriplet>> gold_relations;
};

/// One JSON object per line; blank lines are skipped:
///   {"dialogue_id": "...",
///    "turns": [["user", "..."], ["system", "..."], ...],
///    "terms": ["...", ...],
///    "gold_relations": [["head", "has slot", "tail"], ...]}   (optional)
/// Validation failures name the line and record: unknown speakers, unknown
/// verbalisers, empty or bracket-containing terms, duplicate dialogue ids.
/// Exact duplicate terms within a record collapse to the first occurrence.
std::vector<DialogueRecord> load_dialogues(const std::string& path);
std::vector<DialogueRecord> parse_dialogues(std::istream& in, const std::string& origin);

struct DatasetStats {
  int dialogues = 0;
  int with_gold = 0;
  int gold_instances = 0;  // raw annotation lines, before dedupe
  std::array<int, 4> unique_per_type{};  // indexed by kAllRelationTypes order
  int unique_relations = 0;
  int unique_terms = 0;
};

DatasetStats compute_stats(std::span<const DialogueRecord> records);
std::string format_stats(const DatasetStats& stats);

/// "speaker: utterance" lines, newline-separated, no trailing newline.
std::string render_dialogue_text(const DialogueRecord& record);

}  // namespace dore
