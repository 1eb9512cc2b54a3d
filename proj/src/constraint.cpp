#include "dore/constraint.hpp"

#include <algorithm>
#include <map>

#include "dore/error.hpp"
#include "dore/relations.hpp"

namespace dore {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::free_text: return "free";
    case Phase::head: return "head";
    case Phase::relation: return "relation";
    case Phase::tail: return "tail";
  }
  fail(ErrorCode::internal, "invalid phase");
}

Phase ConstraintState::phase() const {
  if (hypotheses_.empty()) return Phase::free_text;
  return hypotheses_.front().phase;
}

namespace {

int single_token_id(const Backend& backend, const std::string& text) {
  TokenSequence tokens = backend.tokenize(text);
  if (tokens.size() != 1)
    fail(ErrorCode::unsupported,
         "backend tokenizer does not produce a standalone \"" + text + "\" token");
  return tokens.front().id;
}

}  // namespace

ConstraintEngine::ConstraintEngine(const std::vector<std::string>& terms, const Backend& backend) {
  if (terms.empty()) fail(ErrorCode::invalid_argument, "constraint engine needs a non-empty term list");

  open_id_ = single_token_id(backend, "[");
  separator_id_ = single_token_id(backend, ",");
  close_id_ = single_token_id(backend, "]");

  std::vector<TokenSequence> term_tokens;
  term_tokens.reserve(terms.size());
  for (const std::string& term : terms) {
    TokenSequence tokens = backend.tokenize(term);
    if (tokens.empty()) fail(ErrorCode::invalid_argument, "term tokenizes to zero tokens: \"" + term + "\"");
    for (const Token& t : tokens)
      if (t.id == open_id_ || t.id == close_id_)
        fail(ErrorCode::unsupported, "terms containing brackets are not supported: \"" + term + "\"");
    term_tokens.push_back(std::move(tokens));
  }
  term_trie_ = TokenTrie::build(term_tokens);

  std::vector<TokenSequence> verb_tokens;
  for (RelationType type : kAllRelationTypes)
    verb_tokens.push_back(backend.tokenize(std::string(verbaliser(type))));
  verbaliser_trie_ = TokenTrie::build(verb_tokens);
  for (size_t node = 0; node < verbaliser_trie_.node_count(); ++node) {
    if (verbaliser_trie_.terminal(static_cast<int>(node)) &&
        !verbaliser_trie_.children(static_cast<int>(node)).empty())
      fail(ErrorCode::internal, "verbalisers must be pairwise non-prefix");
  }

  // Optional single whitespace after "[" and "," for tokenizers that emit
  // standalone whitespace tokens.
  try {
    TokenSequence ws = backend.tokenize(" ");
    if (ws.size() == 1 && is_whitespace_surface(ws.front().surface)) whitespace_tokens_ = {ws.front()};
  } catch (const Error&) {
    // Tokenizer treats whitespace as a pure delimiter; nothing to allow.
  }
}

LegalTokens ConstraintEngine::legal_next_tokens(const ConstraintState& state) const {
  if (!state.constrained()) return {.unconstrained = true};

  std::map<int, std::string> legal;
  for (const auto& hyp : state.hypotheses_) {
    const TokenTrie& trie = hyp.phase == Phase::relation ? verbaliser_trie_ : term_trie_;
    for (const auto& [token_id, child] : trie.children(hyp.node))
      legal.emplace(token_id, trie.surface_of(token_id));
    if (trie.terminal(hyp.node)) {
      switch (hyp.phase) {
        case Phase::head:
        case Phase::relation:
          legal.emplace(separator_id_, ",");
          break;
        case Phase::tail:
          legal.emplace(close_id_, "]");
          break;
        case Phase::free_text:
          break;
      }
    }
  }
  if (state.whitespace_allowed_)
    for (const Token& ws : whitespace_tokens_) legal.emplace(ws.id, ws.surface);

  if (legal.empty()) fail(ErrorCode::internal, "constrained state has no legal continuation");

  LegalTokens out;
  out.tokens.reserve(legal.size());
  for (const auto& [id, surface] : legal) out.tokens.push_back({id, surface});
  return out;
}

ConstraintState ConstraintEngine::advance(const ConstraintState& state, const Token& token) const {
  if (!state.constrained()) {
    ConstraintState next;
    if (token.id == open_id_) {
      next.hypotheses_.push_back({Phase::head, TokenTrie::kRoot});
      next.whitespace_allowed_ = !whitespace_tokens_.empty();
    }
    return next;
  }

  if (state.whitespace_allowed_) {
    for (const Token& ws : whitespace_tokens_) {
      if (ws.id == token.id) {
        ConstraintState next = state;
        next.whitespace_allowed_ = false;
        return next;
      }
    }
  }

  ConstraintState next;
  bool closed = false;
  for (const auto& hyp : state.hypotheses_) {
    const TokenTrie& trie = hyp.phase == Phase::relation ? verbaliser_trie_ : term_trie_;
    int child = trie.child(hyp.node, token.id);
    if (child >= 0) next.hypotheses_.push_back({hyp.phase, child});
    if (trie.terminal(hyp.node)) {
      if (hyp.phase == Phase::head && token.id == separator_id_)
        next.hypotheses_.push_back({Phase::relation, TokenTrie::kRoot});
      else if (hyp.phase == Phase::relation && token.id == separator_id_)
        next.hypotheses_.push_back({Phase::tail, TokenTrie::kRoot});
      else if (hyp.phase == Phase::tail && token.id == close_id_)
        closed = true;
    }
  }

  if (closed) {
    // Terms cannot contain brackets, so a closing bracket is unambiguous.
    if (!next.hypotheses_.empty())
      fail(ErrorCode::internal, "closing bracket left live constraint hypotheses");
    return ConstraintState{};
  }
  if (next.hypotheses_.empty())
    fail(ErrorCode::invalid_argument,
         "illegal token \"" + token.surface + "\" in " + std::string(phase_name(state.phase())) + " phase");

  std::sort(next.hypotheses_.begin(), next.hypotheses_.end());
  next.hypotheses_.erase(std::unique(next.hypotheses_.begin(), next.hypotheses_.end()),
                         next.hypotheses_.end());
  next.whitespace_allowed_ = token.id == separator_id_ && !whitespace_tokens_.empty();
  return next;
}

MaskedDistribution mask_distribution(const RankedDistribution& dist, const LegalTokens& legal) {
  if (legal.unconstrained) return {dist, false};

  MaskedDistribution out;
  out.dist.context_length = dist.context_length;
  out.dist.residual = 0.0;

  double mass = 0.0;
  for (const auto& entry : dist.entries) {
    for (const Token& t : legal.tokens) {
      if (t.id == entry.id) {
        out.dist.entries.push_back(entry);
        mass += entry.prob;
        break;
      }
    }
  }

  if (out.dist.entries.empty() || mass <= 0.0) {
    out.dist.entries.clear();
    double p = 1.0 / static_cast<double>(legal.tokens.size());
    for (const Token& t : legal.tokens) out.dist.entries.push_back({t.id, t.surface, p});
    out.fallback = true;
    return out;
  }

  for (auto& entry : out.dist.entries) entry.prob /= mass;
  return out;
}

}  // namespace dore
