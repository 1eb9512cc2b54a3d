#pragma once

// Brute-force reference decoder. Reimplements script semantics, constrained
// legality (by enumerating every complete triplet interior instead of using a
// trie), greedy branch expansion and all disparity mathematics from first
// principles, sharing no logic with the library under test.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dore/decoder.hpp"
#include "dore/mock_backend.hpp"

namespace oracle {

struct TripletScore {
  double head = 0.0;
  double relation = 0.0;
  double tail = 0.0;
  double aggregated = 0.0;
  int multiplicity = 0;
};

struct BranchResult {
  std::vector<int> token_ids;
  std::vector<double> p_top;
  std::vector<double> p_next;
  std::string text;
  std::map<std::string, TripletScore> triplets;  // canonical key -> merged score
  double score = -1.0;
};

struct Result {
  std::vector<BranchResult> branches;
  std::map<std::string, double> cross;  // canonical key -> cross-branch mean
  std::map<std::string, int> cross_n;   // canonical key -> branch count
  int selected_branch = 0;
  std::set<std::string> selected;  // canonical keys
};

/// Requires config.top_m == 0 (full distributions) and, when constrained,
/// a non-empty term list.
Result decode(const dore::MockScript& script, const std::string& prompt,
              const std::vector<std::string>& terms, const dore::DecoderConfig& config);

}  // namespace oracle
