#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dore/backend.hpp"
#include "dore/constraint.hpp"
#include "dore/relations.hpp"
#include "dore/token.hpp"

namespace dore {

enum class Aggregation { mean, median, max, min };
enum class SelectionMode { branch_argmax, threshold };
enum class DisparitySource { masked, raw };

const char* aggregation_name(Aggregation strategy);
std::optional<Aggregation> aggregation_from_name(std::string_view name);
/// "branch-argmax" / "threshold".
const char* selection_name(SelectionMode mode);
std::optional<SelectionMode> selection_from_name(std::string_view name);
const char* disparity_source_name(DisparitySource source);
std::optional<DisparitySource> disparity_source_from_name(std::string_view name);

struct DecoderConfig {
  int k = 5;
  int max_new_tokens = 512;
  bool constrained = true;
  DisparitySource disparity_source = DisparitySource::masked;
  Aggregation aggregation = Aggregation::mean;
  SelectionMode selection = SelectionMode::branch_argmax;
  double threshold = 0.5;
  MatchMode match = MatchMode::normalized;
  int top_m = 0;  // 0 = as much as the backend allows

  void validate() const;
};

struct StepRecord {
  int position = 0;
  Token chosen;
  double p_top = 0.0;   // probability of the most likely token at this step
  double p_next = 0.0;  // probability of the second most likely token
  Phase phase = Phase::free_text;
  bool fallback = false;
};

struct ComponentSpan {
  std::vector<int> positions;  // token indices into the branch, structural tokens excluded
};

struct TripletSpans {
  ComponentSpan head;
  ComponentSpan relation;
  ComponentSpan tail;
  RelationTriplet triplet;
};

enum class StopReason { eos, length };

struct Branch {
  int index = 0;
  TokenSequence tokens;           // generated tokens, including the end token if any
  std::vector<StepRecord> steps;  // steps[i] describes tokens[i]
  std::string text;               // detokenized output, end token excluded
  std::vector<TripletSpans> answer_spans;
  int malformed_segments = 0;
  int unclosed_segments = 0;
  StopReason stop = StopReason::length;

  const Token& first_token() const { return tokens.front(); }
};

/// Seeds k branches from the top-k tokens of the first-step distribution, in
/// rank order. Seed 0 carries the greedy token.
std::vector<Branch> branch_first_token(std::span<const int> prompt, int k, const Backend& backend,
                                       int top_m = 0);

/// Extends a one-token seed greedily until end-of-sequence or max_new_tokens,
/// recording per-step top-2 probabilities and advancing the constraint FSM.
/// Pass a null engine for unconstrained decoding.
void continue_greedy(Branch& branch, std::span<const int> prompt, const ConstraintEngine* engine,
                     const DecoderConfig& config, const Backend& backend);

/// Locates every "[...]" segment that parses as (head, verbaliser, tail) and
/// attaches per-component token spans. Structural tokens and whitespace are
/// excluded from the spans; malformed segments are skipped and counted.
void detect_answer_spans(Branch& branch);

int effective_top_m(const DecoderConfig& config, const Backend& backend);

}  // namespace dore
