#pragma once

#include <span>
#include <string>
#include <vector>

#include "dore/decoder.hpp"
#include "dore/scoring.hpp"

namespace dore {

struct DecodeResult {
  std::vector<Branch> branches;
  std::vector<std::vector<TripletDisparity>> disparities;  // one vector per branch
  std::vector<BranchScore> branch_scores;
  std::vector<CrossBranchScore> cross_scores;
  int selected_branch = -1;  // meaningful for branch_argmax selection
  std::vector<RelationTriplet> selected;
  bool partial = false;                    // some branches failed to decode
  std::vector<std::string> branch_errors;  // one message per failed branch
};

/// Full CoT decode: seed k branches at the first token, extend each greedily
/// (constrained over `terms` when configured), score, and select. Branches
/// may be decoded concurrently with `workers` > 1; the result is identical to
/// the sequential one.
DecodeResult decode_cot(std::span<const Token> prompt, const std::vector<std::string>& terms,
                        const DecoderConfig& config, const Backend& backend, int workers = 1);

}  // namespace dore
