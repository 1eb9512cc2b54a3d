#include "dore/evaluator.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "dore/error.hpp"

namespace dore {

namespace {

std::vector<std::set<std::string>> term_sets(std::span<const DialogueRecord> records,
                                             MatchMode mode) {
  std::vector<std::set<std::string>> sets;
  sets.reserve(records.size());
  for (const DialogueRecord& record : records) {
    std::set<std::string> s;
    for (const std::string& term : record.terms) s.insert(canonical_term(term, mode));
    sets.push_back(std::move(s));
  }
  return sets;
}

bool co_occurs(const RelationTriplet& r, const std::set<std::string>& terms, MatchMode mode) {
  return terms.count(canonical_term(r.head, mode)) && terms.count(canonical_term(r.tail, mode));
}

double ratio(int hits, int total) {
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

PRF score_sets(const std::vector<RelationTriplet>& pred, const std::vector<RelationTriplet>& gold,
               const EquivalenceClosure& closure) {
  PRF prf;
  prf.pred_size = static_cast<int>(pred.size());
  prf.gold_size = static_cast<int>(gold.size());
  prf.empty_pred = pred.empty();
  prf.empty_gold = gold.empty();
  for (const RelationTriplet& p : pred) {
    if (std::any_of(gold.begin(), gold.end(),
                    [&](const RelationTriplet& g) { return triplets_match(p, g, closure); }))
      ++prf.matched_pred;
  }
  for (const RelationTriplet& g : gold) {
    if (std::any_of(pred.begin(), pred.end(),
                    [&](const RelationTriplet& p) { return triplets_match(p, g, closure); }))
      ++prf.matched_gold;
  }
  prf.precision = ratio(prf.matched_pred, prf.pred_size);
  prf.recall = ratio(prf.matched_gold, prf.gold_size);
  prf.f1 = prf.precision + prf.recall > 0.0
               ? 2.0 * prf.precision * prf.recall / (prf.precision + prf.recall)
               : 0.0;
  return prf;
}

std::vector<RelationTriplet> of_type(std::span<const RelationTriplet> triplets,
                                     RelationType type) {
  std::vector<RelationTriplet> out;
  for (const RelationTriplet& t : triplets)
    if (t.relation == type) out.push_back(t);
  return out;
}

void print_prf(std::ostream& out, const std::string& row, const PRF& prf) {
  out << std::left << std::setw(14) << row << std::right << std::fixed << std::setprecision(4)
      << std::setw(10) << prf.precision << std::setw(10) << prf.recall << std::setw(10) << prf.f1
      << std::setw(8) << prf.matched_gold << "/" << prf.gold_size << " found, " << prf.pred_size
      << " predicted";
  if (prf.empty_gold) out << " [no gold]";
  out << "\n";
}

}  // namespace

const char* closure_mode_name(ClosureMode mode) {
  return mode == ClosureMode::pairwise ? "pairwise" : "transitive";
}

std::optional<ClosureMode> closure_mode_from_name(std::string_view name) {
  if (name == "pairwise") return ClosureMode::pairwise;
  if (name == "transitive") return ClosureMode::transitive;
  return std::nullopt;
}

GoldOntology collect_gold(std::span<const DialogueRecord> records, MatchMode mode) {
  GoldOntology gold;
  gold.match = mode;
  std::vector<RelationTriplet> all;
  for (const DialogueRecord& record : records) {
    if (!record.gold_relations) continue;
    all.insert(all.end(), record.gold_relations->begin(), record.gold_relations->end());
  }
  gold.relations = dedupe(all, mode);
  return gold;
}

GoldOntology filter_within_dialogue(const GoldOntology& gold,
                                    std::span<const DialogueRecord> records) {
  auto sets = term_sets(records, gold.match);
  GoldOntology filtered;
  filtered.match = gold.match;
  for (const RelationTriplet& r : gold.relations) {
    if (std::any_of(sets.begin(), sets.end(),
                    [&](const auto& s) { return co_occurs(r, s, gold.match); }))
      filtered.relations.push_back(r);
  }
  return filtered;
}

std::vector<RelationTriplet> gold_for_dialogue(const GoldOntology& gold,
                                               const DialogueRecord& record) {
  std::set<std::string> terms;
  for (const std::string& term : record.terms) terms.insert(canonical_term(term, gold.match));
  std::vector<RelationTriplet> out;
  for (const RelationTriplet& r : gold.relations)
    if (co_occurs(r, terms, gold.match)) out.push_back(r);
  return out;
}

EquivalenceClosure EquivalenceClosure::build(std::span<const RelationTriplet> gold_relations,
                                             ClosureMode mode, MatchMode match) {
  EquivalenceClosure closure;
  closure.mode_ = mode;
  closure.match_ = match;

  std::vector<std::pair<std::string, std::string>> links;
  for (const RelationTriplet& r : gold_relations) {
    if (r.relation != RelationType::equivalence) continue;
    std::string a = canonical_term(r.head, match);
    std::string b = canonical_term(r.tail, match);
    if (a > b) std::swap(a, b);
    links.emplace_back(std::move(a), std::move(b));
  }

  if (mode == ClosureMode::pairwise) {
    closure.pairs_.insert(links.begin(), links.end());
    return closure;
  }

  // Transitive: resolve every mentioned term to its class minimum.
  std::map<std::string, std::string> parent;
  auto find = [&](std::string term) {
    while (true) {
      auto it = parent.find(term);
      if (it == parent.end() || it->second == term) return term;
      term = it->second;
    }
  };
  for (const auto& [a, b] : links) {
    parent.try_emplace(a, a);
    parent.try_emplace(b, b);
    std::string ra = find(a), rb = find(b);
    if (ra == rb) continue;
    if (rb < ra) std::swap(ra, rb);  // keep the smaller string as root
    parent[rb] = ra;
  }
  for (const auto& [term, ignored] : parent) closure.representative_[term] = find(term);
  return closure;
}

std::string EquivalenceClosure::representative(const std::string& canonical) const {
  auto it = representative_.find(canonical);
  return it == representative_.end() ? canonical : it->second;
}

bool EquivalenceClosure::equivalent(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  if (mode_ == ClosureMode::transitive) return representative(a) == representative(b);
  return pairs_.count(a < b ? std::make_pair(a, b) : std::make_pair(b, a)) > 0;
}

std::vector<RelationTriplet> apply_closure(std::span<const RelationTriplet> triplets,
                                           const EquivalenceClosure& closure) {
  std::vector<RelationTriplet> substituted;
  substituted.reserve(triplets.size());
  for (const RelationTriplet& original : triplets) {
    RelationTriplet t = original;
    if (closure.mode() == ClosureMode::transitive && t.relation != RelationType::equivalence) {
      t.head = closure.representative(canonical_term(t.head, closure.match()));
      t.tail = closure.representative(canonical_term(t.tail, closure.match()));
    }
    substituted.push_back(std::move(t));
  }
  return dedupe(substituted, closure.match());
}

bool triplets_match(const RelationTriplet& a, const RelationTriplet& b,
                    const EquivalenceClosure& closure) {
  if (a.relation != b.relation) return false;
  std::string ah = canonical_term(a.head, closure.match());
  std::string at = canonical_term(a.tail, closure.match());
  std::string bh = canonical_term(b.head, closure.match());
  std::string bt = canonical_term(b.tail, closure.match());
  if (a.relation == RelationType::equivalence) {
    // Unordered exact pair: equivalence predictions are themselves under
    // evaluation, so substitution does not apply to their terms.
    return (ah == bh && at == bt) || (ah == bt && at == bh);
  }
  return closure.equivalent(ah, bh) && closure.equivalent(at, bt);
}

PRF micro_prf(std::span<const RelationTriplet> predictions, std::span<const RelationTriplet> gold,
              const EquivalenceClosure& closure) {
  return score_sets(apply_closure(predictions, closure), apply_closure(gold, closure), closure);
}

EvalReport evaluate(std::span<const DialoguePredictions> predictions,
                    std::span<const DialogueRecord> records, ClosureMode closure_mode,
                    MatchMode match) {
  std::unordered_set<std::string> known_ids;
  for (const DialogueRecord& record : records) known_ids.insert(record.dialogue_id);
  for (const auto& [id, ignored] : predictions) {
    if (!known_ids.count(id))
      fail(ErrorCode::invalid_argument, "predictions name unknown dialogue \"" + id + "\"");
  }

  EvalReport report;
  report.match = match;
  report.closure = closure_mode;

  GoldOntology full_gold = collect_gold(records, match);
  // The closure uses the full ground truth; the match targets are the
  // within-dialogue relations.
  EquivalenceClosure closure =
      EquivalenceClosure::build(full_gold.relations, closure_mode, match);
  GoldOntology gold = filter_within_dialogue(full_gold, records);

  std::vector<RelationTriplet> all_predictions;
  for (const auto& [id, relations] : predictions)
    all_predictions.insert(all_predictions.end(), relations.begin(), relations.end());

  report.global = micro_prf(all_predictions, gold.relations, closure);
  for (size_t i = 0; i < kAllRelationTypes.size(); ++i) {
    report.per_type[i] = micro_prf(of_type(all_predictions, kAllRelationTypes[i]),
                                   of_type(gold.relations, kAllRelationTypes[i]), closure);
  }

  std::map<std::string, const std::vector<RelationTriplet>*> by_id;
  for (const auto& [id, relations] : predictions) by_id[id] = &relations;
  static const std::vector<RelationTriplet> kNone;
  for (const DialogueRecord& record : records) {
    auto it = by_id.find(record.dialogue_id);
    const std::vector<RelationTriplet>& pred = it == by_id.end() ? kNone : *it->second;
    PRF prf = micro_prf(pred, gold_for_dialogue(gold, record), closure);
    report.dialogue_ids.push_back(record.dialogue_id);
    report.dialogue_precision.push_back(prf.precision);
    report.dialogue_recall.push_back(prf.recall);
    report.dialogue_f1.push_back(prf.f1);
  }
  return report;
}

TTestResult compare_runs(const EvalReport& a, const EvalReport& b) {
  if (a.dialogue_ids != b.dialogue_ids)
    fail(ErrorCode::invalid_argument, "runs cover different dialogues; cannot pair them");
  return paired_ttest(a.dialogue_f1, b.dialogue_f1);
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "" << std::right << std::setw(10) << "precision"
      << std::setw(10) << "recall" << std::setw(10) << "f1" << "\n";
  print_prf(out, "global", report.global);
  for (size_t i = 0; i < kAllRelationTypes.size(); ++i)
    print_prf(out, std::string(relation_name(kAllRelationTypes[i])), report.per_type[i]);
  out << "dialogues: " << report.dialogue_ids.size() << "\n";
  out << "match: " << (report.match == MatchMode::normalized ? "normalized" : "byte-exact")
      << ", closure: " << closure_mode_name(report.closure) << "\n";
  if (report.significance) {
    const TTestResult& t = *report.significance;
    out << "significance: " << t.test;
    if (t.degenerate) {
      out << " degenerate (zero variance)\n";
    } else {
      out << " t=" << std::fixed << std::setprecision(6) << t.t << " df=" << t.df
          << " p=" << t.p_value << (t.significant ? " (significant at 5%)" : " (not significant)")
          << "\n";
    }
  }
  return out.str();
}

}  // namespace dore
