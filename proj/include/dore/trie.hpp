#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dore/token.hpp"

namespace dore {

/// Prefix tree over token ids. Terminal nodes carry the index of the accepted
/// sequence; a node can be terminal and internal at once (e.g. "price" vs
/// "price range").
class TokenTrie {
 public:
  static constexpr int kRoot = 0;

  /// Builds a trie accepting exactly the given token sequences. Sequence
  /// index doubles as the term id at the terminal node.
  static TokenTrie build(const std::vector<TokenSequence>& sequences);

  int child(int node, int token_id) const;  // -1 when there is no edge
  bool terminal(int node) const { return nodes_[node].term_id >= 0; }
  int term_id(int node) const { return nodes_[node].term_id; }
  const std::map<int, int>& children(int node) const { return nodes_[node].children; }
  const std::string& surface_of(int token_id) const;
  size_t node_count() const { return nodes_.size(); }
  size_t sequence_count() const { return sequence_count_; }

  /// Walks the trie from the root; returns the terminal term id or -1.
  int lookup(std::span<const int> ids) const;

 private:
  struct Node {
    std::map<int, int> children;  // token id -> node index
    int term_id = -1;
  };

  std::vector<Node> nodes_{Node{}};
  std::unordered_map<int, std::string> surfaces_;
  size_t sequence_count_ = 0;
};

}  // namespace dore
