#include "dore/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dore/error.hpp"
#include "json.hpp"

namespace dore {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const std::string& origin, size_t line, const std::string& message) {
  fail(ErrorCode::parse_error, origin + ":" + std::to_string(line) + ": " + message);
}

Speaker parse_speaker(const std::string& name, const std::string& origin, size_t line) {
  if (name == "user") return Speaker::user;
  if (name == "system") return Speaker::system;
  fail_at(origin, line, "unknown speaker \"" + name + "\" (expected \"user\" or \"system\")");
}

DialogueRecord parse_record(const json& j, const std::string& origin, size_t line) {
  if (!j.is_object()) fail_at(origin, line, "record is not an object");

  DialogueRecord record;
  if (!j.contains("dialogue_id") || !j["dialogue_id"].is_string() ||
      j["dialogue_id"].get<std::string>().empty())
    fail_at(origin, line, "missing or empty \"dialogue_id\"");
  record.dialogue_id = j["dialogue_id"].get<std::string>();
  const std::string where = "record \"" + record.dialogue_id + "\"";

  if (!j.contains("turns") || !j["turns"].is_array())
    fail_at(origin, line, where + ": missing \"turns\" array");
  for (const auto& t : j["turns"]) {
    if (!t.is_array() || t.size() != 2 || !t[0].is_string() || !t[1].is_string())
      fail_at(origin, line, where + ": each turn must be a [speaker, utterance] string pair");
    record.turns.push_back(
        {parse_speaker(t[0].get<std::string>(), origin, line), t[1].get<std::string>()});
  }

  if (!j.contains("terms") || !j["terms"].is_array())
    fail_at(origin, line, where + ": missing \"terms\" array");
  std::unordered_set<std::string> seen_terms;
  for (const auto& t : j["terms"]) {
    if (!t.is_string()) fail_at(origin, line, where + ": terms must be strings");
    std::string term = t.get<std::string>();
    if (canonicalize(term).empty()) fail_at(origin, line, where + ": empty term");
    if (term.find('[') != std::string::npos || term.find(']') != std::string::npos)
      fail_at(origin, line,
              where + ": term \"" + term + "\" contains a bracket, which the triplet "
              "format cannot represent");
    if (seen_terms.insert(term).second) record.terms.push_back(std::move(term));
  }

  if (j.contains("gold_relations")) {
    if (!j["gold_relations"].is_array())
      fail_at(origin, line, where + ": \"gold_relations\" must be an array");
    std::vector<RelationTriplet> gold;
    for (const auto& r : j["gold_relations"]) {
      if (!r.is_array() || r.size() != 3 || !r[0].is_string() || !r[1].is_string() ||
          !r[2].is_string())
        fail_at(origin, line,
                where + ": each gold relation must be a [head, verbaliser, tail] string triple");
      RelationTriplet triplet;
      triplet.head = r[0].get<std::string>();
      triplet.tail = r[2].get<std::string>();
      triplet.source = RelationTriplet::Source::gold;
      std::string verb = r[1].get<std::string>();
      auto type = relation_from_verbaliser(verb);
      if (!type) fail_at(origin, line, where + ": unknown verbaliser \"" + verb + "\"");
      triplet.relation = *type;
      if (canonicalize(triplet.head).empty() || canonicalize(triplet.tail).empty())
        fail_at(origin, line, where + ": gold relation with empty head or tail");
      gold.push_back(std::move(triplet));
    }
    record.gold_relations = std::move(gold);
  }
  return record;
}

}  // namespace

const char* speaker_name(Speaker speaker) {
  return speaker == Speaker::user ? "user" : "system";
}

std::vector<DialogueRecord> parse_dialogues(std::istream& in, const std::string& origin) {
  std::vector<DialogueRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t content = line.find_first_not_of(" \t\r");
    if (content == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail_at(origin, line_no, e.what());
    }
    DialogueRecord record = parse_record(j, origin, line_no);
    if (!ids.insert(record.dialogue_id).second)
      fail_at(origin, line_no, "duplicate dialogue_id \"" + record.dialogue_id + "\"");
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<DialogueRecord> load_dialogues(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open dataset file: " + path);
  return parse_dialogues(in, path);
}

DatasetStats compute_stats(std::span<const DialogueRecord> records) {
  DatasetStats stats;
  stats.dialogues = static_cast<int>(records.size());
  std::set<std::string> relation_keys;
  std::array<std::set<std::string>, 4> per_type;
  std::set<std::string> terms;
  for (const DialogueRecord& record : records) {
    for (const std::string& term : record.terms) terms.insert(canonicalize(term));
    if (!record.gold_relations) continue;
    ++stats.with_gold;
    stats.gold_instances += static_cast<int>(record.gold_relations->size());
    for (const RelationTriplet& r : *record.gold_relations) {
      std::string key = r.key(MatchMode::normalized);
      relation_keys.insert(key);
      per_type[static_cast<size_t>(r.relation)].insert(std::move(key));
    }
  }
  stats.unique_relations = static_cast<int>(relation_keys.size());
  for (size_t i = 0; i < per_type.size(); ++i)
    stats.unique_per_type[i] = static_cast<int>(per_type[i].size());
  stats.unique_terms = static_cast<int>(terms.size());
  return stats;
}

std::string format_stats(const DatasetStats& stats) {
  std::ostringstream out;
  out << "dialogues:        " << stats.dialogues << "\n"
      << "with gold:        " << stats.with_gold << "\n"
      << "gold instances:   " << stats.gold_instances << "\n"
      << "unique relations: " << stats.unique_relations << " (";
  for (size_t i = 0; i < kAllRelationTypes.size(); ++i) {
    if (i) out << ", ";
    out << relation_name(kAllRelationTypes[i]) << " " << stats.unique_per_type[i];
  }
  out << ")\n"
      << "unique terms:     " << stats.unique_terms << "\n";
  return out.str();
}

std::string render_dialogue_text(const DialogueRecord& record) {
  std::string out;
  for (size_t i = 0; i < record.turns.size(); ++i) {
    if (i) out += '\n';
    out += speaker_name(record.turns[i].speaker);
    out += ": ";
    out += record.turns[i].utterance;
  }
  return out;
}

}  // namespace dore
