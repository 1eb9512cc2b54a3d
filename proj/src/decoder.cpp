#include "dore/decoder.hpp"

#include <algorithm>

#include "dore/error.hpp"

namespace dore {

const char* aggregation_name(Aggregation strategy) {
  switch (strategy) {
    case Aggregation::mean: return "mean";
    case Aggregation::median: return "median";
    case Aggregation::max: return "max";
    case Aggregation::min: return "min";
  }
  return "mean";
}

std::optional<Aggregation> aggregation_from_name(std::string_view name) {
  for (Aggregation a : {Aggregation::mean, Aggregation::median, Aggregation::max, Aggregation::min})
    if (name == aggregation_name(a)) return a;
  return std::nullopt;
}

const char* selection_name(SelectionMode mode) {
  return mode == SelectionMode::branch_argmax ? "branch-argmax" : "threshold";
}

std::optional<SelectionMode> selection_from_name(std::string_view name) {
  if (name == "branch-argmax" || name == "branch_argmax") return SelectionMode::branch_argmax;
  if (name == "threshold") return SelectionMode::threshold;
  return std::nullopt;
}

const char* disparity_source_name(DisparitySource source) {
  return source == DisparitySource::masked ? "masked" : "raw";
}

std::optional<DisparitySource> disparity_source_from_name(std::string_view name) {
  if (name == "masked") return DisparitySource::masked;
  if (name == "raw") return DisparitySource::raw;
  return std::nullopt;
}

void DecoderConfig::validate() const {
  if (k < 1) fail(ErrorCode::invalid_argument, "k must be >= 1");
  if (max_new_tokens < 1) fail(ErrorCode::invalid_argument, "max_new_tokens must be >= 1");
  if (threshold < 0.0 || threshold > 1.0)
    fail(ErrorCode::invalid_argument, "threshold must lie in [0,1]");
  if (top_m < 0) fail(ErrorCode::invalid_argument, "top_m must be >= 0");
}

int effective_top_m(const DecoderConfig& config, const Backend& backend) {
  if (config.top_m > 0) return std::max(config.top_m, 2);
  const BackendInfo info = backend.info();
  if (info.max_top_m > 0) return info.max_top_m;
  if (info.vocab_size > 0) return info.vocab_size;
  return 4096;
}

std::vector<Branch> branch_first_token(std::span<const int> prompt, int k, const Backend& backend,
                                       int top_m) {
  if (k < 1) fail(ErrorCode::invalid_argument, "k must be >= 1");
  RankedDistribution dist = backend.next_distribution(prompt, std::max(top_m, k));
  if (static_cast<int>(dist.entries.size()) < k)
    fail(ErrorCode::invalid_argument,
         "k=" + std::to_string(k) + " exceeds the " + std::to_string(dist.entries.size()) +
             " tokens reported for the first step");
  double p_top = dist.entries[0].prob;
  double p_next = dist.entries.size() > 1 ? dist.entries[1].prob : 0.0;
  std::vector<Branch> seeds;
  seeds.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    Branch b;
    b.index = i;
    const DistEntry& e = dist.entries[static_cast<size_t>(i)];
    b.tokens.push_back({e.id, e.surface});
    StepRecord step;
    step.position = 0;
    step.chosen = b.tokens.back();
    step.p_top = p_top;
    step.p_next = p_next;
    step.phase = Phase::free_text;
    b.steps.push_back(step);
    seeds.push_back(std::move(b));
  }
  return seeds;
}

void continue_greedy(Branch& branch, std::span<const int> prompt, const ConstraintEngine* engine,
                     const DecoderConfig& config, const Backend& backend) {
  config.validate();
  if (branch.tokens.size() != 1 || branch.steps.size() != 1)
    fail(ErrorCode::invalid_argument, "continue_greedy expects a one-token seed");

  const int eos_id = backend.info().eos_id;
  const int top_m = effective_top_m(config, backend);

  ConstraintState state;
  if (engine) state = engine->advance(engine->initial(), branch.tokens.front());

  std::vector<int> context(prompt.begin(), prompt.end());
  context.push_back(branch.tokens.front().id);

  branch.stop = StopReason::length;
  if (branch.tokens.front().id == eos_id) {
    branch.stop = StopReason::eos;
  } else {
    while (static_cast<int>(branch.tokens.size()) < config.max_new_tokens) {
      RankedDistribution dist = backend.next_distribution(context, top_m);
      LegalTokens legal = engine ? engine->legal_next_tokens(state) : LegalTokens{.unconstrained = true};
      MaskedDistribution masked = mask_distribution(dist, legal);
      if (masked.dist.entries.empty())
        fail(ErrorCode::backend_error, "backend reported an empty distribution");

      const RankedDistribution& source =
          config.disparity_source == DisparitySource::raw ? dist : masked.dist;
      const DistEntry& chosen = masked.dist.entries.front();

      StepRecord step;
      step.position = static_cast<int>(branch.tokens.size());
      step.chosen = {chosen.id, chosen.surface};
      step.p_top = source.entries[0].prob;
      step.p_next = source.entries.size() > 1 ? source.entries[1].prob : 0.0;
      step.phase = state.phase();
      step.fallback = masked.fallback;
      branch.steps.push_back(step);
      branch.tokens.push_back(step.chosen);
      context.push_back(chosen.id);
      if (engine) state = engine->advance(state, step.chosen);

      if (chosen.id == eos_id) {
        branch.stop = StopReason::eos;
        break;
      }
    }
  }

  std::span<const Token> visible(branch.tokens);
  if (branch.stop == StopReason::eos) visible = visible.subspan(0, visible.size() - 1);
  branch.text = backend.detokenize(visible);
}

void detect_answer_spans(Branch& branch) {
  branch.answer_spans.clear();
  std::span<const Token> visible(branch.tokens);
  if (branch.stop == StopReason::eos && !visible.empty())
    visible = visible.subspan(0, visible.size() - 1);

  ParseOutcome outcome = extract_triplets(branch.text);
  branch.malformed_segments = outcome.malformed_segments;
  branch.unclosed_segments = outcome.unclosed_segments;
  if (outcome.triplets.empty()) return;

  auto offsets = surface_spans(visible);
  auto tokens_in = [&](const CharSpan& span) {
    ComponentSpan out;
    for (size_t i = 0; i < offsets.size(); ++i) {
      if (offsets[i].first >= span.begin && offsets[i].second <= span.end &&
          !is_whitespace_surface(visible[i].surface))
        out.positions.push_back(static_cast<int>(i));
    }
    return out;
  };

  for (const ParsedTriplet& parsed : outcome.triplets) {
    TripletSpans spans;
    spans.triplet = parsed.triplet;
    spans.head = tokens_in(parsed.head_span);
    spans.relation = tokens_in(parsed.relation_span);
    spans.tail = tokens_in(parsed.tail_span);
    if (spans.head.positions.empty() || spans.relation.positions.empty() ||
        spans.tail.positions.empty()) {
      // A component failed to align with whole tokens; score nothing for it.
      branch.malformed_segments += 1;
      continue;
    }
    branch.answer_spans.push_back(std::move(spans));
  }
}

}  // namespace dore
