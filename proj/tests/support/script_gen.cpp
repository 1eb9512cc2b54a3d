#include "script_gen.hpp"

#include <algorithm>
#include <set>

namespace testgen {
namespace {

using dore::Aggregation;
using dore::DisparitySource;
using dore::MockRule;
using dore::SelectionMode;

double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int pick(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <typename T>
const T& choice(std::mt19937& rng, const std::vector<T>& pool) {
  return pool[static_cast<size_t>(pick(rng, 0, static_cast<int>(pool.size()) - 1))];
}

// Random distribution over `targets` with total mass `mass` (the remainder, if
// any, spreads uniformly over unlisted vocabulary inside the backend).
std::map<std::string, double> random_dist(std::mt19937& rng, std::vector<std::string> targets,
                                          double mass) {
  std::map<std::string, double> dist;
  double sum = 0.0;
  std::vector<double> weights;
  for (size_t i = 0; i < targets.size(); ++i) {
    weights.push_back(uniform(rng, 0.05, 1.0));
    sum += weights.back();
  }
  for (size_t i = 0; i < targets.size(); ++i) dist[targets[i]] = weights[i] / sum * mass;
  return dist;
}

void add_rule(dore::MockScript& script, std::vector<std::string> suffix,
              std::map<std::string, double> dist) {
  for (const auto& rule : script.rules)
    if (rule.suffix == suffix) return;  // backend rejects duplicate suffixes
  MockRule rule;
  rule.suffix = std::move(suffix);
  rule.dist = std::move(dist);
  script.rules.push_back(std::move(rule));
}

std::vector<std::string> sample_targets(std::mt19937& rng, const std::vector<std::string>& pool,
                                        int count) {
  std::vector<std::string> shuffled = pool;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  shuffled.resize(static_cast<size_t>(std::min<int>(count, static_cast<int>(shuffled.size()))));
  return shuffled;
}

dore::DecoderConfig random_config(std::mt19937& rng) {
  dore::DecoderConfig config;
  config.k = pick(rng, 1, 3);
  config.aggregation = static_cast<Aggregation>(pick(rng, 0, 3));
  config.selection = pick(rng, 0, 1) ? SelectionMode::threshold : SelectionMode::branch_argmax;
  config.threshold = uniform(rng, 0.0, 1.0);
  config.disparity_source = pick(rng, 0, 1) ? DisparitySource::raw : DisparitySource::masked;
  return config;
}

}  // namespace

Case small_unconstrained_case(std::mt19937& rng) {
  Case c;
  c.script.vocab = {"has", "slot", "value", "a"};  // + "[", ",", "]", "<eos>" = 8
  std::vector<std::string> everything = {"has", "slot", "value", "a", "[", ",", "]", "<eos>"};

  c.prompt = pick(rng, 0, 1) ? "a" : "a value";

  // Bias toward well-formed triplet fragments so the scoring path is hit.
  add_rule(c.script, {"a"},
           {{"[", uniform(rng, 0.3, 0.6)}, {",", uniform(rng, 0.1, 0.2)},
            {"]", uniform(rng, 0.05, 0.1)}, {"<eos>", uniform(rng, 0.05, 0.1)}});
  add_rule(c.script, {"["}, {{"a", uniform(rng, 0.4, 0.9)}});
  add_rule(c.script, {","}, {{"has", uniform(rng, 0.4, 0.9)}});
  add_rule(c.script, {"has"},
           {{"slot", uniform(rng, 0.2, 0.5)}, {"value", uniform(rng, 0.2, 0.5)}});
  add_rule(c.script, {"slot"}, {{",", uniform(rng, 0.4, 0.9)}});
  add_rule(c.script, {"value"}, {{",", uniform(rng, 0.3, 0.5)}, {"]", uniform(rng, 0.2, 0.4)}});
  add_rule(c.script, {"]"}, {{"<eos>", uniform(rng, 0.3, 0.8)}, {"[", uniform(rng, 0.1, 0.2)}});

  int extra = pick(rng, 0, 3);
  for (int i = 0; i < extra; ++i) {
    std::vector<std::string> suffix;
    int len = pick(rng, 1, 2);
    for (int j = 0; j < len; ++j) suffix.push_back(choice(rng, everything));
    add_rule(c.script, std::move(suffix),
             random_dist(rng, sample_targets(rng, everything, pick(rng, 2, 4)),
                         uniform(rng, 0.5, 1.0)));
  }

  c.config = random_config(rng);
  c.config.constrained = false;
  c.config.max_new_tokens = pick(rng, 2, 6);
  return c;
}

Case constrained_case(std::mt19937& rng) {
  Case c;
  std::vector<std::string> pool = {"hotel", "price", "range", "cheap", "area", "west"};
  std::vector<std::string> verb_words = {"has",     "slot", "value", "domain", "refers",
                                         "to",      "same", "concept", "as"};
  c.script.vocab = {"relations:"};
  for (const auto& w : pool) c.script.vocab.push_back(w);
  for (const auto& w : verb_words) c.script.vocab.push_back(w);

  std::vector<std::string> everything = c.script.vocab;
  everything.insert(everything.end(), {"[", ",", "]", "<eos>"});

  std::vector<std::string> term_pool = {"hotel", "price range", "cheap",
                                        "area",  "west",        "price",
                                        "area, west"};
  std::set<std::string> chosen;
  int term_count = pick(rng, 2, 4);
  while (static_cast<int>(chosen.size()) < term_count) chosen.insert(choice(rng, term_pool));
  c.terms.assign(chosen.begin(), chosen.end());

  c.prompt = "relations:";
  add_rule(c.script, {"relations:"},
           {{"[", uniform(rng, 0.4, 0.9)}, {"<eos>", uniform(rng, 0.05, 0.1)}});
  add_rule(c.script, {"]"}, {{"<eos>", uniform(rng, 0.5, 0.9)}});

  int extra = pick(rng, 2, 8);
  for (int i = 0; i < extra; ++i) {
    std::vector<std::string> suffix;
    int len = pick(rng, 1, 2);
    for (int j = 0; j < len; ++j) suffix.push_back(choice(rng, everything));
    add_rule(c.script, std::move(suffix),
             random_dist(rng, sample_targets(rng, everything, pick(rng, 2, 5)),
                         uniform(rng, 0.5, 1.0)));
  }

  c.config = random_config(rng);
  c.config.constrained = true;
  c.config.max_new_tokens = pick(rng, 8, 24);
  return c;
}

Case bracket_free_case(std::mt19937& rng) {
  Case c;
  // Verbaliser words are present so the constraint engine can be built, but
  // no rule ever assigns them (or "[") any probability mass.
  c.script.vocab = {"x",      "y",  "z",    "w",       "has", "slot", "value",
                    "domain", "to", "same", "concept", "as",  "refers"};
  std::vector<std::string> targets_pool = {"x", "y", "z", "w", "<eos>"};
  c.terms = {"x", "y z"};
  c.prompt = pick(rng, 0, 1) ? "x" : "x y";

  // Every rule's mass sums to exactly 1 over non-"[" tokens, and the uniform
  // default resolves ties toward token id 0 ("x"), so "[" is never generated.
  int rule_count = pick(rng, 2, 6);
  std::vector<std::string> suffix_pool = {"x", "y", "z", "w", ",", "]"};
  for (int i = 0; i < rule_count; ++i) {
    std::vector<std::string> suffix;
    int len = pick(rng, 1, 2);
    for (int j = 0; j < len; ++j) suffix.push_back(choice(rng, suffix_pool));
    add_rule(c.script, std::move(suffix),
             random_dist(rng, sample_targets(rng, targets_pool, pick(rng, 2, 4)), 1.0));
  }

  c.config = random_config(rng);
  c.config.max_new_tokens = pick(rng, 2, 12);
  return c;
}

}  // namespace testgen
