#include "dore/trie.hpp"

#include "dore/error.hpp"

namespace dore {

TokenTrie TokenTrie::build(const std::vector<TokenSequence>& sequences) {
  if (sequences.empty()) fail(ErrorCode::invalid_argument, "cannot build a trie from an empty sequence list");
  TokenTrie trie;
  trie.sequence_count_ = sequences.size();
  for (size_t seq_index = 0; seq_index < sequences.size(); ++seq_index) {
    const TokenSequence& seq = sequences[seq_index];
    if (seq.empty()) fail(ErrorCode::invalid_argument, "trie sequence tokenizes to zero tokens");
    int node = kRoot;
    for (const Token& token : seq) {
      trie.surfaces_.emplace(token.id, token.surface);
      int next = trie.child(node, token.id);
      if (next < 0) {
        next = static_cast<int>(trie.nodes_.size());
        trie.nodes_.emplace_back();  // may reallocate; re-index below
        trie.nodes_[node].children.emplace(token.id, next);
      }
      node = next;
    }
    if (trie.nodes_[node].term_id >= 0 && trie.nodes_[node].term_id != static_cast<int>(seq_index))
      fail(ErrorCode::invalid_argument, "duplicate sequence in trie input");
    trie.nodes_[node].term_id = static_cast<int>(seq_index);
  }
  return trie;
}

int TokenTrie::child(int node, int token_id) const {
  const auto& children = nodes_[node].children;
  auto it = children.find(token_id);
  return it == children.end() ? -1 : it->second;
}

const std::string& TokenTrie::surface_of(int token_id) const {
  auto it = surfaces_.find(token_id);
  if (it == surfaces_.end()) fail(ErrorCode::internal, "token id not present in trie");
  return it->second;
}

int TokenTrie::lookup(std::span<const int> ids) const {
  int node = kRoot;
  for (int id : ids) {
    node = child(node, id);
    if (node < 0) return -1;
  }
  return term_id(node);
}

}  // namespace dore
