#include "compare.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace testgen {

namespace {
constexpr double kTol = 1e-12;

bool close(double a, double b) { return std::fabs(a - b) <= kTol; }
}  // namespace

std::string compare_with_oracle(const dore::DecodeResult& impl, const oracle::Result& ref,
                                const dore::DecoderConfig& config) {
  std::ostringstream err;
  if (impl.branches.size() != ref.branches.size()) {
    err << "branch count " << impl.branches.size() << " vs " << ref.branches.size();
    return err.str();
  }

  for (size_t b = 0; b < impl.branches.size(); ++b) {
    const dore::Branch& ib = impl.branches[b];
    const oracle::BranchResult& rb = ref.branches[b];
    if (ib.tokens.size() != rb.token_ids.size()) {
      err << "branch " << b << ": " << ib.tokens.size() << " tokens vs " << rb.token_ids.size();
      return err.str();
    }
    for (size_t t = 0; t < ib.tokens.size(); ++t) {
      if (ib.tokens[t].id != rb.token_ids[t]) {
        err << "branch " << b << " token " << t << ": id " << ib.tokens[t].id << " vs "
            << rb.token_ids[t];
        return err.str();
      }
      if (!close(ib.steps[t].p_top, rb.p_top[t]) || !close(ib.steps[t].p_next, rb.p_next[t])) {
        err << "branch " << b << " step " << t << ": (" << ib.steps[t].p_top << ","
            << ib.steps[t].p_next << ") vs (" << rb.p_top[t] << "," << rb.p_next[t] << ")";
        return err.str();
      }
    }
    if (ib.text != rb.text) {
      err << "branch " << b << " text \"" << ib.text << "\" vs \"" << rb.text << "\"";
      return err.str();
    }

    std::map<std::string, dore::TripletDisparity> by_key;
    for (const dore::TripletDisparity& d : impl.disparities[b])
      by_key.emplace(d.triplet.key(config.match), d);
    if (by_key.size() != rb.triplets.size()) {
      err << "branch " << b << ": " << by_key.size() << " triplets vs " << rb.triplets.size();
      return err.str();
    }
    for (const auto& [key, want] : rb.triplets) {
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        err << "branch " << b << ": missing triplet " << key;
        return err.str();
      }
      const dore::TripletDisparity& got = it->second;
      if (got.multiplicity != want.multiplicity || !close(got.head, want.head) ||
          !close(got.relation, want.relation) || !close(got.tail, want.tail) ||
          !close(got.aggregated, want.aggregated)) {
        err << "branch " << b << " triplet " << key << ": (" << got.head << "," << got.relation
            << "," << got.tail << "," << got.aggregated << ",x" << got.multiplicity << ") vs ("
            << want.head << "," << want.relation << "," << want.tail << "," << want.aggregated
            << ",x" << want.multiplicity << ")";
        return err.str();
      }
    }
    if (!close(impl.branch_scores[b].score, rb.score)) {
      err << "branch " << b << " score " << impl.branch_scores[b].score << " vs " << rb.score;
      return err.str();
    }
  }

  std::map<std::string, const dore::CrossBranchScore*> cross;
  for (const dore::CrossBranchScore& c : impl.cross_scores)
    cross.emplace(c.triplet.key(config.match), &c);
  if (cross.size() != ref.cross.size()) {
    err << "cross-branch set size " << cross.size() << " vs " << ref.cross.size();
    return err.str();
  }
  for (const auto& [key, want] : ref.cross) {
    auto it = cross.find(key);
    if (it == cross.end()) {
      err << "missing cross-branch triplet " << key;
      return err.str();
    }
    if (!close(it->second->score, want) || it->second->n_branches != ref.cross_n.at(key)) {
      err << "cross-branch " << key << ": (" << it->second->score << ",n" << it->second->n_branches
          << ") vs (" << want << ",n" << ref.cross_n.at(key) << ")";
      return err.str();
    }
  }

  if (config.selection == dore::SelectionMode::branch_argmax &&
      impl.selected_branch != ref.selected_branch) {
    err << "selected branch " << impl.selected_branch << " vs " << ref.selected_branch;
    return err.str();
  }
  std::set<std::string> selected;
  for (const dore::RelationTriplet& t : impl.selected) selected.insert(t.key(config.match));
  if (selected != ref.selected) {
    err << "selected sets differ (" << selected.size() << " vs " << ref.selected.size() << ")";
    return err.str();
  }
  return {};
}

}  // namespace testgen
