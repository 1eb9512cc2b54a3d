#include "dore/cot.hpp"

#include <atomic>
#include <memory>
#include <thread>

#include "dore/error.hpp"

namespace dore {

DecodeResult decode_cot(std::span<const Token> prompt, const std::vector<std::string>& terms,
                        const DecoderConfig& config, const Backend& backend, int workers) {
  config.validate();
  if (config.constrained && terms.empty())
    fail(ErrorCode::invalid_argument, "constrained decoding needs a non-empty term list");

  std::unique_ptr<ConstraintEngine> engine;
  if (config.constrained) engine = std::make_unique<ConstraintEngine>(terms, backend);

  std::vector<int> prompt_ids = token_ids(prompt);
  DecodeResult result;
  result.branches =
      branch_first_token(prompt_ids, config.k, backend, effective_top_m(config, backend));
  result.branch_errors.assign(result.branches.size(), "");

  auto decode_one = [&](size_t i) {
    Branch& branch = result.branches[i];
    try {
      continue_greedy(branch, prompt_ids, engine.get(), config, backend);
    } catch (const std::exception& e) {
      result.branch_errors[i] = "branch " + std::to_string(branch.index) + ": " + e.what();
      std::span<const Token> visible(branch.tokens);
      if (branch.stop == StopReason::eos && !visible.empty())
        visible = visible.subspan(0, visible.size() - 1);
      branch.text = join_surfaces(visible);
    }
    detect_answer_spans(branch);
  };

  if (workers > 1 && !backend.info().serialized && result.branches.size() > 1) {
    std::atomic<size_t> cursor{0};
    auto run = [&] {
      for (size_t i = cursor.fetch_add(1); i < result.branches.size(); i = cursor.fetch_add(1))
        decode_one(i);
    };
    std::vector<std::thread> pool;
    size_t n = std::min<size_t>(static_cast<size_t>(workers), result.branches.size());
    pool.reserve(n);
    for (size_t t = 0; t < n; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  } else {
    for (size_t i = 0; i < result.branches.size(); ++i) decode_one(i);
  }

  std::erase(result.branch_errors, "");
  result.partial = !result.branch_errors.empty();

  result.disparities.reserve(result.branches.size());
  result.branch_scores.reserve(result.branches.size());
  for (const Branch& branch : result.branches) {
    result.disparities.push_back(triplet_disparities(branch, config.aggregation, config.match));
    result.branch_scores.push_back(branch_score(branch.index, result.disparities.back()));
  }
  result.cross_scores = cross_branch_disparity(result.disparities, config.match);

  if (config.selection == SelectionMode::branch_argmax) {
    result.selected_branch = select_branch_argmax(result.branch_scores);
    for (const TripletDisparity& d : result.disparities[static_cast<size_t>(result.selected_branch)])
      result.selected.push_back(d.triplet);
  } else {
    result.selected = select_by_threshold(result.cross_scores, config.threshold);
  }
  return result;
}

}  // namespace dore
