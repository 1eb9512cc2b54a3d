#include "dore/mock_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dore/error.hpp"
#include "json.hpp"

namespace dore {

namespace {

bool is_structural_char(char c) { return c == '[' || c == ']' || c == ','; }

}  // namespace

MockScript MockScript::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open mock script: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

MockScript MockScript::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("mock script is not valid JSON: ") + e.what());
  }
  MockScript script;
  if (!j.contains("vocab") || !j["vocab"].is_array())
    fail(ErrorCode::parse_error, "mock script needs a \"vocab\" array");
  for (const auto& v : j["vocab"]) script.vocab.push_back(v.get<std::string>());
  if (j.contains("rules")) {
    for (const auto& r : j["rules"]) {
      MockRule rule;
      for (const auto& s : r.at("suffix")) rule.suffix.push_back(s.get<std::string>());
      for (const auto& [surface, prob] : r.at("dist").items())
        rule.dist[surface] = prob.get<double>();
      script.rules.push_back(std::move(rule));
    }
  }
  if (j.contains("max_context")) script.max_context = j["max_context"].get<int>();
  return script;
}

MockBackend::MockBackend(MockScript script) : max_context_(script.max_context) {
  vocab_ = std::move(script.vocab);
  // Structural tokens and the end marker are always part of the vocabulary.
  for (const char* required : {"[", ",", "]", kEosSurface}) {
    if (std::find(vocab_.begin(), vocab_.end(), required) == vocab_.end())
      vocab_.emplace_back(required);
  }
  for (size_t i = 0; i < vocab_.size(); ++i) {
    const std::string& s = vocab_[i];
    if (s.empty()) fail(ErrorCode::parse_error, "mock vocab contains an empty surface");
    if (s != kEosSurface) {
      for (unsigned char c : s)
        if (std::isspace(c)) fail(ErrorCode::parse_error, "mock vocab surface contains whitespace: \"" + s + "\"");
      if (s.size() > 1) {
        for (char c : s)
          if (is_structural_char(c))
            fail(ErrorCode::parse_error, "mock vocab surface mixes structural characters: \"" + s + "\"");
      }
    }
    if (!index_.emplace(s, static_cast<int>(i)).second)
      fail(ErrorCode::parse_error, "duplicate mock vocab surface: \"" + s + "\"");
  }
  eos_id_ = index_.at(kEosSurface);

  const size_t n = vocab_.size();
  uniform_.assign(n, 1.0 / static_cast<double>(n));

  for (const MockRule& rule : script.rules) {
    CompiledRule compiled;
    if (rule.suffix.empty()) fail(ErrorCode::parse_error, "mock rule with empty suffix");
    for (const std::string& s : rule.suffix) {
      auto it = index_.find(s);
      if (it == index_.end()) fail(ErrorCode::parse_error, "mock rule suffix token not in vocab: \"" + s + "\"");
      compiled.suffix.push_back(it->second);
    }
    for (const auto& other : rules_) {
      if (other.suffix == compiled.suffix)
        fail(ErrorCode::parse_error, "duplicate mock rule suffix");
    }
    compiled.probs.assign(n, 0.0);
    double sum = 0.0;
    size_t listed = 0;
    for (const auto& [surface, prob] : rule.dist) {
      auto it = index_.find(surface);
      if (it == index_.end()) fail(ErrorCode::parse_error, "mock rule dist token not in vocab: \"" + surface + "\"");
      if (prob < 0.0 || prob > 1.0 + 1e-9)
        fail(ErrorCode::parse_error, "mock rule probability out of [0,1] for \"" + surface + "\"");
      compiled.probs[it->second] = prob;
      sum += prob;
      ++listed;
    }
    if (sum > 1.0 + 1e-9) fail(ErrorCode::parse_error, "mock rule distribution mass exceeds 1");
    size_t unlisted = n - listed;
    if (unlisted == 0) {
      if (std::abs(sum - 1.0) > 1e-9)
        fail(ErrorCode::parse_error, "mock rule over full vocab must sum to 1");
    } else if (sum < 1.0 - 1e-12) {
      double spread = (1.0 - sum) / static_cast<double>(unlisted);
      for (size_t i = 0; i < n; ++i)
        if (rule.dist.find(vocab_[i]) == rule.dist.end()) compiled.probs[i] = spread;
    }
    rules_.push_back(std::move(compiled));
  }
}

BackendInfo MockBackend::info() const {
  BackendInfo info;
  info.name = "mock";
  info.vocab_size = static_cast<int>(vocab_.size());
  info.eos_id = eos_id_;
  info.max_context = max_context_;
  info.max_top_m = static_cast<int>(vocab_.size());
  info.serialized = false;
  return info;
}

int MockBackend::id_of(const std::string& surface) const {
  auto it = index_.find(surface);
  return it == index_.end() ? -1 : it->second;
}

const std::string& MockBackend::surface_of(int id) const {
  if (id < 0 || id >= static_cast<int>(vocab_.size()))
    fail(ErrorCode::invalid_argument, "unknown token id " + std::to_string(id));
  return vocab_[id];
}

TokenSequence MockBackend::tokenize(const std::string& text) const {
  TokenSequence out;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    auto it = index_.find(word);
    if (it == index_.end())
      fail(ErrorCode::invalid_argument, "text contains a word outside the mock vocabulary: \"" + word + "\"");
    out.push_back({it->second, word});
    word.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (is_structural_char(c)) {
      flush();
      std::string s(1, c);
      out.push_back({index_.at(s), s});
    } else {
      word += c;
    }
  }
  flush();
  return out;
}

std::string MockBackend::detokenize(std::span<const Token> tokens) const {
  for (const Token& t : tokens)
    if (t.id < 0 || t.id >= static_cast<int>(vocab_.size()))
      fail(ErrorCode::invalid_argument, "unknown token id " + std::to_string(t.id));
  return join_surfaces(tokens);
}

const MockBackend::CompiledRule* MockBackend::best_rule(std::span<const int> context) const {
  const CompiledRule* best = nullptr;
  for (const auto& rule : rules_) {
    size_t len = rule.suffix.size();
    if (len > context.size()) continue;
    if (best && best->suffix.size() >= len) continue;
    if (std::equal(rule.suffix.begin(), rule.suffix.end(), context.end() - len)) best = &rule;
  }
  return best;
}

RankedDistribution MockBackend::next_distribution(std::span<const int> context, int top_m) const {
  if (top_m < 2) fail(ErrorCode::invalid_argument, "top_m must be at least 2");
  if (static_cast<int>(context.size()) > max_context_)
    fail(ErrorCode::backend_error, "context exceeds mock backend limit of " + std::to_string(max_context_));
  for (int id : context)
    if (id < 0 || id >= static_cast<int>(vocab_.size()))
      fail(ErrorCode::invalid_argument, "context contains unknown token id " + std::to_string(id));

  const CompiledRule* rule = best_rule(context);
  const std::vector<double>& probs = rule ? rule->probs : uniform_;

  std::vector<int> order(vocab_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  });

  RankedDistribution dist;
  dist.context_length = static_cast<int>(context.size());
  size_t keep = std::min<size_t>(static_cast<size_t>(top_m), order.size());
  double kept_mass = 0.0;
  dist.entries.reserve(keep);
  for (size_t i = 0; i < keep; ++i) {
    int id = order[i];
    dist.entries.push_back({id, vocab_[id], probs[id]});
    kept_mass += probs[id];
  }
  dist.residual = std::max(0.0, 1.0 - kept_mass);
  return dist;
}

}  // namespace dore
