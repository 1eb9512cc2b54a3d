#pragma once

#include <span>
#include <vector>

#include "dore/decoder.hpp"
#include "dore/relations.hpp"

namespace dore {

struct TripletDisparity {
  int branch = 0;
  RelationTriplet triplet;
  double head = 0.0;
  double relation = 0.0;
  double tail = 0.0;
  double aggregated = 0.0;
  int multiplicity = 1;  // occurrences of the canonical triplet within the branch
};

struct BranchScore {
  int branch = 0;
  double score = -1.0;  // -1 when the branch produced no relations
  int n_relations = 0;
};

struct CrossBranchScore {
  RelationTriplet triplet;
  double score = 0.0;
  int n_branches = 0;
};

/// Mean of (p_top - p_next) over the steps of one component span.
double span_disparity(std::span<const StepRecord> steps);

double aggregate_triplet(double head, double relation, double tail, Aggregation strategy);

/// Per-triplet disparities for one branch. Canonically identical triplets are
/// merged into a single entry carrying the mean of their aggregated
/// disparities and the occurrence count.
std::vector<TripletDisparity> triplet_disparities(const Branch& branch, Aggregation strategy,
                                                  MatchMode match);

BranchScore branch_score(int branch_index, std::span<const TripletDisparity> disparities);

/// Index of the branch with maximal score; ties go to the lowest index.
int select_branch_argmax(std::span<const BranchScore> scores);

/// Mean aggregated disparity per canonical triplet across the branches that
/// contain it (each contributing its within-branch value once).
std::vector<CrossBranchScore> cross_branch_disparity(
    std::span<const std::vector<TripletDisparity>> per_branch, MatchMode match);

/// Triplets whose cross-branch disparity strictly exceeds the threshold.
std::vector<RelationTriplet> select_by_threshold(std::span<const CrossBranchScore> scores,
                                                 double threshold);

}  // namespace dore
