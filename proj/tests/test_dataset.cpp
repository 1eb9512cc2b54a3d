#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "dore/dataset.hpp"
#include "dore/error.hpp"

using namespace dore;

namespace {

std::vector<DialogueRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dialogues(in, "test");
}

const char* kGood = R"({"dialogue_id": "d1", "turns": [["user", "i need a hotel"], ["system", "sure"]], "terms": ["hotel", "price range"], "gold_relations": [["hotel", "has slot", "price range"]]}
{"dialogue_id": "d2", "turns": [["user", "cheap please"]], "terms": ["price range", "cheap"], "gold_relations": [["price range", "has value", "cheap"], ["cheap", "refers to same concept as", "inexpensive"]]}

{"dialogue_id": "d3", "turns": [], "terms": ["cheap"]}
)";

}  // namespace

TEST_CASE("well-formed records parse with all fields") {
  auto records = parse(kGood);
  REQUIRE(records.size() == 3);

  CHECK(records[0].dialogue_id == "d1");
  REQUIRE(records[0].turns.size() == 2);
  CHECK(records[0].turns[0].speaker == Speaker::user);
  CHECK(records[0].turns[0].utterance == "i need a hotel");
  CHECK(records[0].turns[1].speaker == Speaker::system);
  CHECK(records[0].terms == std::vector<std::string>{"hotel", "price range"});
  REQUIRE(records[0].gold_relations.has_value());
  REQUIRE(records[0].gold_relations->size() == 1);
  CHECK((*records[0].gold_relations)[0].relation == RelationType::domain_slot);
  CHECK((*records[0].gold_relations)[0].source == RelationTriplet::Source::gold);

  REQUIRE(records[1].gold_relations.has_value());
  CHECK((*records[1].gold_relations)[1].relation == RelationType::equivalence);

  CHECK(records[2].turns.empty());
  CHECK(!records[2].gold_relations.has_value());
}

TEST_CASE("parse failures name the line") {
  auto check_fails = [](const std::string& text, const std::string& needle) {
    try {
      parse(text);
      FAIL_CHECK("expected failure for: " << text << " (wanted \"" << needle << "\")");
    } catch (const Error& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                    "message was: ", e.what());
    }
  };

  check_fails("not json\n", "test:1");
  check_fails(R"({"dialogue_id": "", "turns": [], "terms": []})", "dialogue_id");
  check_fails(R"({"turns": [], "terms": []})", "dialogue_id");
  check_fails(R"({"dialogue_id": "d", "terms": []})", "turns");
  check_fails(R"({"dialogue_id": "d", "turns": [["narrator", "hi"]], "terms": []})", "narrator");
  check_fails(R"({"dialogue_id": "d", "turns": [["user"]], "terms": []})", "pair");
  check_fails(R"({"dialogue_id": "d", "turns": []})", "terms");
  check_fails(R"({"dialogue_id": "d", "turns": [], "terms": ["  "]})", "empty term");
  check_fails(R"({"dialogue_id": "d", "turns": [], "terms": ["a[b"]})", "bracket");
  check_fails(
      R"({"dialogue_id": "d", "turns": [], "terms": [], "gold_relations": [["a", "is a", "b"]]})",
      "is a");
  check_fails(
      R"({"dialogue_id": "d", "turns": [], "terms": [], "gold_relations": [["", "has slot", "b"]]})",
      "empty head");
  check_fails(
      R"({"dialogue_id": "d", "turns": [], "terms": [], "gold_relations": [["a", "has slot"]]})",
      "triple");

  std::string dup = R"({"dialogue_id": "d", "turns": [], "terms": []})";
  check_fails(dup + "\n" + dup + "\n", "test:2");
  check_fails(dup + "\n" + dup + "\n", "duplicate");
}

TEST_CASE("record ids appear in validation messages") {
  try {
    parse(R"({"dialogue_id": "weird-7", "turns": [], "terms": [], "gold_relations": [["a", "is a", "b"]]})");
    FAIL_CHECK("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("weird-7") != std::string::npos);
  }
}

TEST_CASE("exact duplicate terms collapse to the first occurrence") {
  auto records =
      parse(R"({"dialogue_id": "d", "turns": [], "terms": ["a", "b", "a"]})");
  CHECK(records[0].terms == std::vector<std::string>{"a", "b"});
}

TEST_CASE("statistics count unique canonical relations per type") {
  auto records = parse(kGood);
  DatasetStats stats = compute_stats(records);
  CHECK(stats.dialogues == 3);
  CHECK(stats.with_gold == 2);
  CHECK(stats.gold_instances == 3);
  CHECK(stats.unique_relations == 3);
  CHECK(stats.unique_per_type[0] == 1);  // domain-slot
  CHECK(stats.unique_per_type[1] == 1);  // slot-value
  CHECK(stats.unique_per_type[2] == 0);  // value-domain
  CHECK(stats.unique_per_type[3] == 1);  // equivalence
  CHECK(stats.unique_terms == 3);        // hotel, price range, cheap

  std::string text = format_stats(stats);
  CHECK(text.find("dialogues:        3") != std::string::npos);
  CHECK(text.find("slot-value 1") != std::string::npos);
}

TEST_CASE("duplicate gold annotations across dialogues count once") {
  auto records = parse(
      R"({"dialogue_id": "a", "turns": [], "terms": ["x"], "gold_relations": [["Hotel", "has slot", "area"]]}
{"dialogue_id": "b", "turns": [], "terms": ["x"], "gold_relations": [["hotel", "has slot", "AREA"]]}
)");
  DatasetStats stats = compute_stats(records);
  CHECK(stats.gold_instances == 2);
  CHECK(stats.unique_relations == 1);
}

TEST_CASE("dialogue text renders speaker-prefixed lines") {
  auto records = parse(kGood);
  CHECK(render_dialogue_text(records[0]) == "user: i need a hotel\nsystem: sure");
  CHECK(render_dialogue_text(records[2]) == "");
}

TEST_CASE("missing files are io errors") {
  CHECK_THROWS_AS(load_dialogues("does/not/exist.jsonl"), Error);
}
