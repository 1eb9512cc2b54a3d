#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dore/backend.hpp"
#include "dore/token.hpp"
#include "dore/trie.hpp"

namespace dore {

enum class Phase { free_text, head, relation, tail };

std::string_view phase_name(Phase phase);

class ConstraintEngine;

/// Decoding-time constraint cursor. Because terms may share a comma with the
/// triplet separator, the state tracks every live interpretation at once; the
/// phase reported to callers is the first one in head < relation < tail
/// order. An empty hypothesis set means free (unconstrained) generation.
class ConstraintState {
 public:
  Phase phase() const;
  bool constrained() const { return !hypotheses_.empty(); }

 private:
  friend class ConstraintEngine;
  struct Hypothesis {
    Phase phase;
    int node;
    bool operator==(const Hypothesis&) const = default;
    bool operator<(const Hypothesis& o) const {
      return phase != o.phase ? phase < o.phase : node < o.node;
    }
  };
  std::vector<Hypothesis> hypotheses_;
  bool whitespace_allowed_ = false;
};

struct LegalTokens {
  bool unconstrained = false;
  std::vector<Token> tokens;  // constrained phases only, sorted by id
};

struct MaskedDistribution {
  RankedDistribution dist;
  bool fallback = false;  // no legal token carried mass; uniform over legal used
};

/// Token-trie machinery restricting generation, once an opening bracket is
/// produced, to (term, separator, verbaliser, separator, term, closing
/// bracket). Immutable after construction and shareable across branches.
class ConstraintEngine {
 public:
  ConstraintEngine(const std::vector<std::string>& terms, const Backend& backend);

  ConstraintState initial() const { return {}; }
  LegalTokens legal_next_tokens(const ConstraintState& state) const;
  /// Moves the cursor. The token must be legal for the state; anything else
  /// signals a decoder bug and throws.
  ConstraintState advance(const ConstraintState& state, const Token& token) const;

  const TokenTrie& term_trie() const { return term_trie_; }
  const TokenTrie& verbaliser_trie() const { return verbaliser_trie_; }
  int open_id() const { return open_id_; }
  int separator_id() const { return separator_id_; }
  int close_id() const { return close_id_; }

 private:
  TokenTrie term_trie_;
  TokenTrie verbaliser_trie_;
  int open_id_ = -1;
  int separator_id_ = -1;
  int close_id_ = -1;
  std::vector<Token> whitespace_tokens_;
};

/// Zeroes the probability of illegal tokens and renormalizes over the legal
/// ones, preserving their order. When no legal token carries mass in the
/// reported entries, falls back to uniform over the legal set and flags it.
MaskedDistribution mask_distribution(const RankedDistribution& dist, const LegalTokens& legal);

}  // namespace dore
