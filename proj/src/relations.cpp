#include "dore/relations.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "dore/error.hpp"

namespace dore {

std::string_view verbaliser(RelationType type) {
  switch (type) {
    case RelationType::domain_slot: return "has slot";
    case RelationType::slot_value: return "has value";
    case RelationType::value_domain: return "has domain";
    case RelationType::equivalence: return "refers to same concept as";
  }
  fail(ErrorCode::internal, "invalid relation type");
}

std::string_view relation_name(RelationType type) {
  switch (type) {
    case RelationType::domain_slot: return "domain-slot";
    case RelationType::slot_value: return "slot-value";
    case RelationType::value_domain: return "value-domain";
    case RelationType::equivalence: return "equivalence";
  }
  fail(ErrorCode::internal, "invalid relation type");
}

std::optional<RelationType> relation_from_verbaliser(std::string_view text) {
  for (RelationType type : kAllRelationTypes)
    if (text == verbaliser(type)) return type;
  return std::nullopt;
}

std::optional<RelationType> relation_from_name(std::string_view name) {
  for (RelationType type : kAllRelationTypes)
    if (name == relation_name(type)) return type;
  return std::nullopt;
}

const char* match_mode_name(MatchMode mode) {
  return mode == MatchMode::normalized ? "normalized" : "byte-exact";
}

std::optional<MatchMode> match_mode_from_name(std::string_view name) {
  if (name == "normalized") return MatchMode::normalized;
  if (name == "byte-exact" || name == "byte_exact") return MatchMode::byte_exact;
  return std::nullopt;
}

std::string canonicalize(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  bool pending_space = false;
  for (unsigned char c : surface) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(c));
    }
  }
  return out;
}

std::string canonical_term(std::string_view surface, MatchMode mode) {
  if (mode == MatchMode::byte_exact) return std::string(surface);
  return canonicalize(surface);
}

std::string RelationTriplet::key(MatchMode mode) const {
  std::string h = canonical_term(head, mode);
  std::string t = canonical_term(tail, mode);
  if (relation == RelationType::equivalence && t < h) std::swap(h, t);
  std::string out(relation_name(relation));
  out += '|';
  out += h;
  out += '|';
  out += t;
  return out;
}

bool same_relation(const RelationTriplet& a, const RelationTriplet& b, MatchMode mode) {
  return a.key(mode) == b.key(mode);
}

std::string bracket_form(const RelationTriplet& triplet) {
  std::string out = "[";
  out += triplet.head;
  out += ", ";
  out += verbaliser(triplet.relation);
  out += ", ";
  out += triplet.tail;
  out += ']';
  return out;
}

std::vector<RelationTriplet> dedupe(std::span<const RelationTriplet> triplets, MatchMode mode) {
  std::vector<RelationTriplet> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : triplets)
    if (seen.insert(t.key(mode)).second) out.push_back(t);
  return out;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// A verbaliser occurrence acts as the triplet delimiter only when it is
// flanked by commas (modulo whitespace) on both sides.
struct DelimiterMatch {
  size_t left_comma;   // index of the comma before the verbaliser
  size_t verb_begin;
  size_t verb_end;     // one past the verbaliser
  size_t right_comma;  // index of the comma after the verbaliser
  RelationType type;
};

std::vector<DelimiterMatch> find_delimiters(std::string_view interior) {
  std::vector<DelimiterMatch> matches;
  for (RelationType type : kAllRelationTypes) {
    std::string_view verb = verbaliser(type);
    size_t from = 0;
    while (true) {
      size_t pos = interior.find(verb, from);
      if (pos == std::string_view::npos) break;
      from = pos + 1;
      // Left boundary: skip whitespace backwards, require a comma.
      size_t l = pos;
      while (l > 0 && is_space(interior[l - 1])) --l;
      if (l == 0 || interior[l - 1] != ',') continue;
      // Right boundary: skip whitespace forwards, require a comma.
      size_t r = pos + verb.size();
      while (r < interior.size() && is_space(interior[r])) ++r;
      if (r >= interior.size() || interior[r] != ',') continue;
      matches.push_back({l - 1, pos, pos + verb.size(), r, type});
    }
  }
  return matches;
}

CharSpan trimmed_span(std::string_view text, size_t begin, size_t end) {
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return {begin, end};
}

}  // namespace

ParseOutcome extract_triplets(std::string_view text) {
  ParseOutcome out;
  size_t pos = 0;
  while (true) {
    size_t open = text.find('[', pos);
    if (open == std::string_view::npos) break;
    size_t close = text.find(']', open + 1);
    if (close == std::string_view::npos) {
      out.unclosed_segments += 1;
      break;
    }
    pos = close + 1;
    std::string_view interior = text.substr(open + 1, close - open - 1);
    auto matches = find_delimiters(interior);
    if (matches.size() != 1) {
      out.malformed_segments += 1;
      continue;
    }
    const DelimiterMatch& m = matches.front();
    CharSpan head = trimmed_span(interior, 0, m.left_comma);
    CharSpan tail = trimmed_span(interior, m.right_comma + 1, interior.size());
    if (head.begin == head.end || tail.begin == tail.end) {
      out.malformed_segments += 1;
      continue;
    }
    size_t base = open + 1;
    ParsedTriplet parsed;
    parsed.triplet.head = std::string(interior.substr(head.begin, head.end - head.begin));
    parsed.triplet.tail = std::string(interior.substr(tail.begin, tail.end - tail.begin));
    parsed.triplet.relation = m.type;
    parsed.triplet.source = RelationTriplet::Source::parsed;
    parsed.head_span = {base + head.begin, base + head.end};
    parsed.relation_span = {base + m.verb_begin, base + m.verb_end};
    parsed.tail_span = {base + tail.begin, base + tail.end};
    out.triplets.push_back(std::move(parsed));
  }
  return out;
}

}  // namespace dore
