#include "dore/token.hpp"

#include <cctype>
#include <cmath>

#include "dore/error.hpp"

namespace dore {

double RankedDistribution::entry_mass() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.prob;
  return sum;
}

void RankedDistribution::validate() const {
  double sum = residual;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.prob < -1e-12 || e.prob > 1.0 + 1e-9)
      fail(ErrorCode::internal, "distribution probability out of [0,1]");
    if (i > 0) {
      const auto& p = entries[i - 1];
      bool ordered = p.prob > e.prob || (p.prob == e.prob && p.id < e.id);
      if (!ordered) fail(ErrorCode::internal, "distribution entries not in rank order");
    }
    sum += e.prob;
  }
  if (residual < -1e-9) fail(ErrorCode::internal, "negative residual mass");
  if (std::abs(sum - 1.0) > 1e-9) fail(ErrorCode::internal, "distribution mass does not sum to 1");
}

bool is_whitespace_surface(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s)
    if (!std::isspace(c)) return false;
  return true;
}

std::vector<std::pair<size_t, size_t>> surface_spans(std::span<const Token> tokens) {
  std::vector<std::pair<size_t, size_t>> spans;
  spans.reserve(tokens.size());
  size_t offset = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& cur = tokens[i].surface;
    if (i > 0) {
      const std::string& prev = tokens[i - 1].surface;
      bool space = cur != "," && cur != "]" && prev != "[" &&
                   !is_whitespace_surface(prev) && !is_whitespace_surface(cur);
      if (space) offset += 1;
    }
    spans.emplace_back(offset, offset + cur.size());
    offset += cur.size();
  }
  return spans;
}

std::string join_surfaces(std::span<const Token> tokens) {
  auto spans = surface_spans(tokens);
  std::string out(tokens.empty() ? 0 : spans.back().second, ' ');
  for (size_t i = 0; i < tokens.size(); ++i)
    out.replace(spans[i].first, tokens[i].surface.size(), tokens[i].surface);
  return out;
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::vector<int> token_ids(std::span<const Token> tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(t.id);
  return ids;
}

}  // namespace dore
