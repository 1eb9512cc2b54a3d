#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dore/relations.hpp"

namespace dore {

struct OntologyRelation {
  RelationTriplet triplet;  // first-seen surface forms
  std::vector<std::string> dialogue_ids;  // sorted, unique
};

enum class TermRole { domain, slot, value };

const char* term_role_name(TermRole role);

struct TermTypeInfo {
  std::array<int, 3> votes{};  // indexed by TermRole order
  TermRole label = TermRole::domain;
  bool conflict = false;  // top vote tied; label falls back to role priority
};

/// Dataset-level relation set. Relations are sorted by canonical key and
/// provenance lists are sorted, so the ontology is independent of input
/// order. term_types and equivalence_classes are derived from the relations.
struct Ontology {
  MatchMode match = MatchMode::normalized;
  std::vector<OntologyRelation> relations;
  std::map<std::string, TermTypeInfo> term_types;  // canonical term -> info
  std::vector<std::vector<std::string>> equivalence_classes;
};

using DialoguePredictions = std::pair<std::string, std::vector<RelationTriplet>>;

/// Union with canonical dedupe and per-relation provenance. Associative and
/// commutative over inputs: any permutation yields the identical ontology.
Ontology accumulate(std::span<const DialoguePredictions> per_dialogue, MatchMode mode);

/// Votes per unique relation: head of a domain-slot relation is a domain and
/// its tail a slot; head of slot-value a slot, tail a value; head of
/// value-domain a value, tail a domain. Equivalence contributes no votes.
/// The label is the vote majority; ties flag a conflict and resolve by role
/// priority domain > slot > value.
std::map<std::string, TermTypeInfo> infer_term_types(const Ontology& ontology);

/// Partition of the terms mentioned by equivalence relations, under their
/// symmetric-transitive closure. Class members and the class list are sorted;
/// terms never mentioned by an equivalence relation are implicit singletons
/// and do not appear.
std::vector<std::vector<std::string>> equivalence_classes(
    std::span<const RelationTriplet> relations, MatchMode mode);

/// Structured-text rendering: relations with provenance, term-type table,
/// equivalence classes.
std::string format_ontology(const Ontology& ontology);

}  // namespace dore
