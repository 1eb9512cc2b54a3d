#include "dore/ontology.hpp"

#include <algorithm>
#include <sstream>

#include "dore/error.hpp"

namespace dore {

namespace {

// Union-find with path compression; roots resolve to the lexicographic
// minimum at extraction time.
class TermUnion {
 public:
  void unite(const std::string& a, const std::string& b) {
    size_t ra = find(index(a)), rb = find(index(b));
    if (ra != rb) parent_[rb] = ra;
  }

  std::vector<std::vector<std::string>> classes() const {
    std::map<size_t, std::vector<std::string>> by_root;
    for (const auto& [term, idx] : ids_) by_root[find(idx)].push_back(term);
    std::vector<std::vector<std::string>> out;
    for (auto& [root, members] : by_root) {
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
  }

 private:
  size_t index(const std::string& term) {
    auto [it, inserted] = ids_.emplace(term, parent_.size());
    if (inserted) parent_.push_back(it->second);
    return it->second;
  }

  size_t find(size_t i) const {
    while (parent_[i] != i) i = parent_[i];
    return i;
  }

  std::map<std::string, size_t> ids_;
  mutable std::vector<size_t> parent_;
};

void vote(std::map<std::string, TermTypeInfo>& table, const std::string& term, TermRole role) {
  table[term].votes[static_cast<size_t>(role)] += 1;
}

}  // namespace

const char* term_role_name(TermRole role) {
  switch (role) {
    case TermRole::domain: return "domain";
    case TermRole::slot: return "slot";
    case TermRole::value: return "value";
  }
  return "?";
}

Ontology accumulate(std::span<const DialoguePredictions> per_dialogue, MatchMode mode) {
  Ontology ontology;
  ontology.match = mode;

  std::map<std::string, OntologyRelation> by_key;
  for (const auto& [dialogue_id, relations] : per_dialogue) {
    for (const RelationTriplet& triplet : relations) {
      auto [it, inserted] = by_key.try_emplace(triplet.key(mode));
      if (inserted) it->second.triplet = triplet;
      it->second.dialogue_ids.push_back(dialogue_id);
    }
  }
  for (auto& [key, relation] : by_key) {
    std::sort(relation.dialogue_ids.begin(), relation.dialogue_ids.end());
    relation.dialogue_ids.erase(
        std::unique(relation.dialogue_ids.begin(), relation.dialogue_ids.end()),
        relation.dialogue_ids.end());
    ontology.relations.push_back(std::move(relation));
  }

  // Canonical identity fixed the order, but the stored surfaces must not
  // depend on which dialogue came first under normalized matching: keep the
  // canonical surface forms themselves.
  if (mode == MatchMode::normalized) {
    for (OntologyRelation& r : ontology.relations) {
      r.triplet.head = canonicalize(r.triplet.head);
      r.triplet.tail = canonicalize(r.triplet.tail);
    }
  }

  ontology.term_types = infer_term_types(ontology);
  std::vector<RelationTriplet> triplets;
  triplets.reserve(ontology.relations.size());
  for (const OntologyRelation& r : ontology.relations) triplets.push_back(r.triplet);
  ontology.equivalence_classes = equivalence_classes(triplets, mode);
  return ontology;
}

std::map<std::string, TermTypeInfo> infer_term_types(const Ontology& ontology) {
  std::map<std::string, TermTypeInfo> table;
  for (const OntologyRelation& r : ontology.relations) {
    std::string head = canonical_term(r.triplet.head, ontology.match);
    std::string tail = canonical_term(r.triplet.tail, ontology.match);
    switch (r.triplet.relation) {
      case RelationType::domain_slot:
        vote(table, head, TermRole::domain);
        vote(table, tail, TermRole::slot);
        break;
      case RelationType::slot_value:
        vote(table, head, TermRole::slot);
        vote(table, tail, TermRole::value);
        break;
      case RelationType::value_domain:
        vote(table, head, TermRole::value);
        vote(table, tail, TermRole::domain);
        break;
      case RelationType::equivalence:
        break;
    }
  }
  for (auto& [term, info] : table) {
    int best = *std::max_element(info.votes.begin(), info.votes.end());
    int winners = static_cast<int>(std::count(info.votes.begin(), info.votes.end(), best));
    info.conflict = winners > 1;
    // Role priority = enum order, so the first maximum is the display label.
    for (size_t i = 0; i < info.votes.size(); ++i) {
      if (info.votes[i] == best) {
        info.label = static_cast<TermRole>(i);
        break;
      }
    }
  }
  return table;
}

std::vector<std::vector<std::string>> equivalence_classes(
    std::span<const RelationTriplet> relations, MatchMode mode) {
  TermUnion classes;
  for (const RelationTriplet& r : relations) {
    if (r.relation != RelationType::equivalence) continue;
    classes.unite(canonical_term(r.head, mode), canonical_term(r.tail, mode));
  }
  return classes.classes();
}

std::string format_ontology(const Ontology& ontology) {
  std::ostringstream out;
  out << "# relations (" << ontology.relations.size() << ")\n";
  for (const OntologyRelation& r : ontology.relations) {
    out << bracket_form(r.triplet) << "  <-";
    for (const std::string& id : r.dialogue_ids) out << " " << id;
    out << "\n";
  }
  out << "\n# term types (" << ontology.term_types.size() << ")\n";
  for (const auto& [term, info] : ontology.term_types) {
    out << term << ": " << term_role_name(info.label) << " (domain=" << info.votes[0]
        << ", slot=" << info.votes[1] << ", value=" << info.votes[2] << ")";
    if (info.conflict) out << " [conflict]";
    out << "\n";
  }
  out << "\n# equivalence classes (" << ontology.equivalence_classes.size() << ")\n";
  for (const auto& members : ontology.equivalence_classes) {
    out << "{";
    for (size_t i = 0; i < members.size(); ++i) {
      if (i) out << ", ";
      out << members[i];
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace dore
