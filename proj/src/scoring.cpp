#include "dore/scoring.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "dore/error.hpp"

namespace dore {

double span_disparity(std::span<const StepRecord> steps) {
  if (steps.empty()) fail(ErrorCode::invalid_argument, "span_disparity: empty span");
  double sum = 0.0;
  for (const StepRecord& s : steps) sum += s.p_top - s.p_next;
  return sum / static_cast<double>(steps.size());
}

double aggregate_triplet(double head, double relation, double tail, Aggregation strategy) {
  switch (strategy) {
    case Aggregation::mean:
      return (head + relation + tail) / 3.0;
    case Aggregation::median: {
      double lo = std::min({head, relation, tail});
      double hi = std::max({head, relation, tail});
      return head + relation + tail - lo - hi;
    }
    case Aggregation::max:
      return std::max({head, relation, tail});
    case Aggregation::min:
      return std::min({head, relation, tail});
  }
  fail(ErrorCode::internal, "aggregate_triplet: unknown strategy");
}

namespace {

std::vector<StepRecord> gather(const Branch& branch, const ComponentSpan& span) {
  std::vector<StepRecord> out;
  out.reserve(span.positions.size());
  for (int pos : span.positions) out.push_back(branch.steps.at(static_cast<size_t>(pos)));
  return out;
}

}  // namespace

std::vector<TripletDisparity> triplet_disparities(const Branch& branch, Aggregation strategy,
                                                  MatchMode match) {
  std::vector<TripletDisparity> out;
  std::map<std::string, size_t> by_key;  // canonical key -> index into out
  for (const TripletSpans& spans : branch.answer_spans) {
    double h = span_disparity(gather(branch, spans.head));
    double r = span_disparity(gather(branch, spans.relation));
    double t = span_disparity(gather(branch, spans.tail));
    double agg = aggregate_triplet(h, r, t, strategy);
    std::string key = spans.triplet.key(match);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      TripletDisparity d;
      d.branch = branch.index;
      d.triplet = spans.triplet;
      d.head = h;
      d.relation = r;
      d.tail = t;
      d.aggregated = agg;
      by_key.emplace(std::move(key), out.size());
      out.push_back(std::move(d));
    } else {
      // Repeated triplet: fold into a running mean over its occurrences.
      TripletDisparity& d = out[it->second];
      double n = static_cast<double>(d.multiplicity);
      d.head = (d.head * n + h) / (n + 1.0);
      d.relation = (d.relation * n + r) / (n + 1.0);
      d.tail = (d.tail * n + t) / (n + 1.0);
      d.aggregated = (d.aggregated * n + agg) / (n + 1.0);
      d.multiplicity += 1;
    }
  }
  return out;
}

BranchScore branch_score(int branch_index, std::span<const TripletDisparity> disparities) {
  BranchScore score;
  score.branch = branch_index;
  score.n_relations = static_cast<int>(disparities.size());
  if (disparities.empty()) {
    score.score = -1.0;
    return score;
  }
  double sum = 0.0;
  for (const TripletDisparity& d : disparities) sum += d.aggregated;
  score.score = sum / static_cast<double>(disparities.size());
  return score;
}

int select_branch_argmax(std::span<const BranchScore> scores) {
  if (scores.empty()) fail(ErrorCode::invalid_argument, "select_branch_argmax: no branches");
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].score > scores[static_cast<size_t>(best)].score) best = static_cast<int>(i);
  }
  return scores[static_cast<size_t>(best)].branch;
}

std::vector<CrossBranchScore> cross_branch_disparity(
    std::span<const std::vector<TripletDisparity>> per_branch, MatchMode match) {
  std::vector<CrossBranchScore> out;
  std::map<std::string, size_t> by_key;
  for (const auto& branch_disparities : per_branch) {
    for (const TripletDisparity& d : branch_disparities) {
      std::string key = d.triplet.key(match);
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        CrossBranchScore c;
        c.triplet = d.triplet;
        c.score = d.aggregated;
        c.n_branches = 1;
        by_key.emplace(std::move(key), out.size());
        out.push_back(std::move(c));
      } else {
        CrossBranchScore& c = out[it->second];
        double n = static_cast<double>(c.n_branches);
        c.score = (c.score * n + d.aggregated) / (n + 1.0);
        c.n_branches += 1;
      }
    }
  }
  return out;
}

std::vector<RelationTriplet> select_by_threshold(std::span<const CrossBranchScore> scores,
                                                 double threshold) {
  if (threshold < 0.0 || threshold > 1.0)
    fail(ErrorCode::invalid_argument, "select_by_threshold: threshold outside [0,1]");
  std::vector<RelationTriplet> out;
  for (const CrossBranchScore& c : scores) {
    if (c.score > threshold) out.push_back(c.triplet);
  }
  return out;
}

}  // namespace dore
