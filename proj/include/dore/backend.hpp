#pragma once

#include <memory>
#include <span>
#include <string>

#include "dore/token.hpp"

namespace dore {

struct BackendInfo {
  std::string name;
  int vocab_size = -1;    // -1 when the backend does not expose it
  int eos_id = -1;        // -1 when unknown
  int max_context = -1;   // -1 = unbounded
  int max_top_m = -1;     // -1 = full vocabulary
  bool serialized = false;  // true if requests must not run concurrently
};

/// Uniform interface to a next-token language model. Implementations must be
/// safe for concurrent independent requests unless info().serialized is set.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendInfo info() const = 0;
  virtual TokenSequence tokenize(const std::string& text) const = 0;
  virtual std::string detokenize(std::span<const Token> tokens) const = 0;

  /// Next-token distribution for the given context, truncated to top_m
  /// entries with the tail mass reported as residual. top_m must be >= 2.
  virtual RankedDistribution next_distribution(std::span<const int> context, int top_m) const = 0;
};

/// Opens a backend from a descriptor of the form "mock:SCRIPT_PATH" or
/// "http:URL".
std::unique_ptr<Backend> open_backend(const std::string& descriptor);

}  // namespace dore
