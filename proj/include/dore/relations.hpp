#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dore {

enum class RelationType { domain_slot, slot_value, value_domain, equivalence };

inline constexpr std::array<RelationType, 4> kAllRelationTypes = {
    RelationType::domain_slot, RelationType::slot_value, RelationType::value_domain,
    RelationType::equivalence};

/// Natural-language rendering used in prompts and generated triplets.
std::string_view verbaliser(RelationType type);
/// Report/CLI name ("domain-slot", "slot-value", "value-domain", "equivalence").
std::string_view relation_name(RelationType type);
std::optional<RelationType> relation_from_verbaliser(std::string_view text);
std::optional<RelationType> relation_from_name(std::string_view name);

/// How term surfaces are compared: normalized folds case and whitespace,
/// byte_exact compares raw strings.
enum class MatchMode { normalized, byte_exact };

/// "normalized" / "byte-exact".
const char* match_mode_name(MatchMode mode);
std::optional<MatchMode> match_mode_from_name(std::string_view name);

/// Trim, collapse internal whitespace runs to one space, case-fold.
std::string canonicalize(std::string_view surface);
std::string canonical_term(std::string_view surface, MatchMode mode);

struct RelationTriplet {
  enum class Source { parsed, gold };

  std::string head;
  std::string tail;
  RelationType relation = RelationType::domain_slot;
  Source source = Source::parsed;

  /// Canonical identity. Equivalence triplets compare as unordered pairs;
  /// the other types are directed.
  std::string key(MatchMode mode) const;
};

bool same_relation(const RelationTriplet& a, const RelationTriplet& b, MatchMode mode);

/// "[head, verbaliser, tail]" as it appears in prompts and outputs.
std::string bracket_form(const RelationTriplet& triplet);

/// Set semantics over canonical identity, first occurrence kept.
std::vector<RelationTriplet> dedupe(std::span<const RelationTriplet> triplets, MatchMode mode);

/// Character range [begin, end) into the text a triplet was parsed from.
struct CharSpan {
  size_t begin = 0;
  size_t end = 0;
};

struct ParsedTriplet {
  RelationTriplet triplet;
  CharSpan head_span;
  CharSpan relation_span;
  CharSpan tail_span;
};

struct ParseOutcome {
  std::vector<ParsedTriplet> triplets;
  int malformed_segments = 0;
  int unclosed_segments = 0;
};

/// Extracts relational triplets from generated text. Every "[...]" segment is
/// split at its unique comma-delimited verbaliser occurrence, so commas inside
/// terms survive. Segments with zero or ambiguous verbaliser matches or an
/// empty head/tail are skipped and counted as malformed; a trailing "[" with
/// no closing bracket is counted as unclosed.
ParseOutcome extract_triplets(std::string_view text);

}  // namespace dore
