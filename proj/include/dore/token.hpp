#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dore {

struct Token {
  int id = -1;
  std::string surface;

  bool operator==(const Token&) const = default;
};

using TokenSequence = std::vector<Token>;

struct DistEntry {
  int id = -1;
  std::string surface;
  double prob = 0.0;
};

/// Next-token distribution truncated to the top-m entries, ordered by
/// probability descending with ties broken by token id ascending. The mass
/// beyond the truncation is carried explicitly in `residual` so the whole
/// distribution always sums to 1.
struct RankedDistribution {
  std::vector<DistEntry> entries;
  double residual = 0.0;
  int context_length = 0;

  double entry_mass() const;
  /// Checks ordering, probability bounds and normalization (1e-9 slack).
  void validate() const;
};

bool is_whitespace_surface(const std::string& s);

/// Joins token surfaces with word spacing: a single space between word
/// tokens, none after "[" and none before "," or "]".
std::string join_surfaces(std::span<const Token> tokens);

/// [begin, end) character range of each token's surface within
/// join_surfaces(tokens); separators belong to no token.
std::vector<std::pair<size_t, size_t>> surface_spans(std::span<const Token> tokens);

/// Trims and collapses internal whitespace runs to a single space.
std::string normalize_whitespace(std::string_view s);

std::vector<int> token_ids(std::span<const Token> tokens);

}  // namespace dore
