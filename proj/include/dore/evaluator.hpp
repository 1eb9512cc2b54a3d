#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dore/dataset.hpp"
#include "dore/ontology.hpp"
#include "dore/stats.hpp"

namespace dore {

/// transitive merges equivalence chains into classes; pairwise honours only
/// directly annotated pairs.
enum class ClosureMode { pairwise, transitive };

const char* closure_mode_name(ClosureMode mode);
std::optional<ClosureMode> closure_mode_from_name(std::string_view name);

struct GoldOntology {
  MatchMode match = MatchMode::normalized;
  std::vector<RelationTriplet> relations;  // deduped under match
};

/// Union of the records' gold annotations.
GoldOntology collect_gold(std::span<const DialogueRecord> records, MatchMode mode);

/// Keeps relations whose head and tail both occur in at least one record's
/// term list.
GoldOntology filter_within_dialogue(const GoldOntology& gold,
                                    std::span<const DialogueRecord> records);

/// The gold relations whose terms co-occur in this record's term list.
std::vector<RelationTriplet> gold_for_dialogue(const GoldOntology& gold,
                                               const DialogueRecord& record);

/// Term substitution derived from gold equivalence relations only; predicted
/// equivalences never feed the closure. Equivalence-type triplets themselves
/// are matched as unordered pairs without substitution.
class EquivalenceClosure {
 public:
  EquivalenceClosure() = default;  // identity closure

  static EquivalenceClosure build(std::span<const RelationTriplet> gold_relations,
                                  ClosureMode mode, MatchMode match);

  ClosureMode mode() const { return mode_; }
  MatchMode match() const { return match_; }

  /// Class representative (lexicographic minimum) under transitive mode;
  /// identity in pairwise mode. Input and output are canonical terms.
  std::string representative(const std::string& canonical) const;

  /// Whether two canonical terms count as the same term.
  bool equivalent(const std::string& a, const std::string& b) const;

 private:
  ClosureMode mode_ = ClosureMode::transitive;
  MatchMode match_ = MatchMode::normalized;
  std::map<std::string, std::string> representative_;
  std::set<std::pair<std::string, std::string>> pairs_;  // each stored sorted
};

/// Canonicalizes and dedupes a triplet set for matching. Transitive mode
/// replaces the head and tail of non-equivalence triplets by their class
/// representative first, so gold items that collapse count once.
std::vector<RelationTriplet> apply_closure(std::span<const RelationTriplet> triplets,
                                           const EquivalenceClosure& closure);

/// Type-equal and componentwise-equivalent; equivalence-type triplets compare
/// as unordered exact pairs.
bool triplets_match(const RelationTriplet& a, const RelationTriplet& b,
                    const EquivalenceClosure& closure);

struct PRF {
  int pred_size = 0;
  int gold_size = 0;
  int matched_pred = 0;  // predictions matching at least one gold item
  int matched_gold = 0;  // gold items found at least once
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_pred = false;
  bool empty_gold = false;  // recall undefined, reported as 0
};

PRF micro_prf(std::span<const RelationTriplet> predictions,
              std::span<const RelationTriplet> gold, const EquivalenceClosure& closure);

struct EvalReport {
  MatchMode match = MatchMode::normalized;
  ClosureMode closure = ClosureMode::transitive;
  PRF global;
  std::array<PRF, 4> per_type;  // indexed by kAllRelationTypes order
  std::vector<std::string> dialogue_ids;
  std::vector<double> dialogue_precision;
  std::vector<double> dialogue_recall;
  std::vector<double> dialogue_f1;
  std::optional<TTestResult> significance;
};

/// Full evaluation: accumulated predictions against the within-dialogue
/// filtered gold set, with the closure built from the unfiltered gold
/// equivalences. Prediction ids must name records.
EvalReport evaluate(std::span<const DialoguePredictions> predictions,
                    std::span<const DialogueRecord> records, ClosureMode closure_mode,
                    MatchMode match);

/// Paired t-test over per-dialogue F1 of two runs on the same records.
TTestResult compare_runs(const EvalReport& a, const EvalReport& b);

std::string format_report(const EvalReport& report);

}  // namespace dore
