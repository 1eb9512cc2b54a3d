#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "dore/backend.hpp"

namespace dore {

struct MockRule {
  std::vector<std::string> suffix;     // context tail, as token surfaces
  std::map<std::string, double> dist;  // surface -> probability
};

/// Script for the deterministic mock model: a word-level vocabulary plus
/// suffix-matching rules. The longest matching suffix wins; contexts with no
/// matching rule get a uniform distribution over the vocabulary. Probability
/// mass a rule leaves unassigned is spread uniformly over the unlisted
/// vocabulary tokens.
struct MockScript {
  std::vector<std::string> vocab;
  std::vector<MockRule> rules;
  int max_context = 4096;

  static MockScript from_file(const std::string& path);
  static MockScript from_json_text(const std::string& text);
};

/// Scripted next-token model with a word-level tokenizer in which "[", ","
/// and "]" are standalone tokens. Immutable and safe for concurrent reads
/// after construction.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script);

  BackendInfo info() const override;
  TokenSequence tokenize(const std::string& text) const override;
  std::string detokenize(std::span<const Token> tokens) const override;
  RankedDistribution next_distribution(std::span<const int> context, int top_m) const override;

  int id_of(const std::string& surface) const;  // -1 when absent
  const std::string& surface_of(int id) const;
  int vocab_size() const { return static_cast<int>(vocab_.size()); }
  int eos_id() const { return eos_id_; }

  static constexpr const char* kEosSurface = "<eos>";

 private:
  struct CompiledRule {
    std::vector<int> suffix;
    std::vector<double> probs;  // full vocabulary
  };

  const CompiledRule* best_rule(std::span<const int> context) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  std::vector<CompiledRule> rules_;
  std::vector<double> uniform_;
  int eos_id_ = -1;
  int max_context_ = 4096;
};

}  // namespace dore
