#pragma once

#include <memory>
#include <string>

#include "dore/mock_backend.hpp"

namespace dore {

/// Serves a MockBackend over the wire protocol. Binds an ephemeral port when
/// constructed with port 0.
class MockServer {
 public:
  explicit MockServer(MockScript script, std::string host = "127.0.0.1", int port = 0);
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  void start();
  void stop();
  bool running() const;
  int port() const;
  std::string url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dore
