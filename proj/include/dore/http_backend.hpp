#pragma once

#include <string>

#include "dore/backend.hpp"

namespace dore {

/// Wire-protocol client for an external model server:
///   POST /v1/tokenize {"text": ...} -> {"tokens": [[id, surface], ...]}
///   POST /v1/next {"context": [ids], "top_m": n} -> {"entries": [[id,
///       surface, prob], ...], "residual": p}
///   GET /v1/info -> capability record (optional; defaults apply without it)
/// Detokenization happens client-side from surfaces. Each request uses its
/// own connection, so instances are safe for concurrent use.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::string base_url);

  BackendInfo info() const override;
  TokenSequence tokenize(const std::string& text) const override;
  std::string detokenize(std::span<const Token> tokens) const override;
  RankedDistribution next_distribution(std::span<const int> context, int top_m) const override;

 private:
  std::string base_url_;
  BackendInfo info_;
};

}  // namespace dore
