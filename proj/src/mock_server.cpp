#include "dore/mock_server.hpp"

#include <stdexcept>
#include <thread>
#include <vector>

#include "dore/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace dore {

namespace {

using nlohmann::json;

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler and maps exceptions onto the wire: domain errors become 400
// with an {"error": ...} body, anything else becomes 500.
template <typename Fn>
void guarded(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
  try {
    json body;
    if (!req.body.empty()) body = json::parse(req.body);
    reply_json(res, 200, fn(body));
  } catch (const json::exception& e) {
    reply_json(res, 400, json{{"error", std::string("malformed request: ") + e.what()}});
  } catch (const Error& e) {
    reply_json(res, 400, json{{"error", e.what()}});
  } catch (const std::exception& e) {
    reply_json(res, 500, json{{"error", e.what()}});
  }
}

std::vector<int> context_ids(const MockBackend& backend, const json& body) {
  if (!body.contains("context"))
    fail(ErrorCode::invalid_argument, "next request lacks a context field");
  const json& ctx = body["context"];
  if (ctx.is_array()) {
    std::vector<int> ids;
    ids.reserve(ctx.size());
    for (const auto& v : ctx) {
      if (!v.is_number_integer())
        fail(ErrorCode::invalid_argument, "context array must contain token ids");
      ids.push_back(v.get<int>());
    }
    return ids;
  }
  if (ctx.is_object() && ctx.contains("text") && ctx["text"].is_string()) {
    std::vector<int> ids;
    for (const Token& t : backend.tokenize(ctx["text"].get<std::string>())) ids.push_back(t.id);
    return ids;
  }
  fail(ErrorCode::invalid_argument, "context must be an id array or {\"text\": ...}");
}

}  // namespace

struct MockServer::Impl {
  MockBackend backend;
  std::string host;
  int requested_port = 0;
  int bound_port = -1;
  httplib::Server server;
  std::thread thread;

  explicit Impl(MockScript script, std::string host_arg, int port_arg)
      : backend(std::move(script)), host(std::move(host_arg)), requested_port(port_arg) {
    server.Get("/v1/info", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [this](const json&) {
        BackendInfo info = backend.info();
        return json{{"name", info.name},         {"vocab_size", info.vocab_size},
                    {"eos_id", info.eos_id},     {"max_context", info.max_context},
                    {"max_top_m", info.max_top_m}, {"serialized", info.serialized}};
      });
    });
    server.Post("/v1/tokenize", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [this](const json& body) {
        if (!body.contains("text") || !body["text"].is_string())
          fail(ErrorCode::invalid_argument, "tokenize request needs a text string");
        json tokens = json::array();
        for (const Token& t : backend.tokenize(body["text"].get<std::string>()))
          tokens.push_back(json::array({t.id, t.surface}));
        return json{{"tokens", tokens}};
      });
    });
    server.Post("/v1/next", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [this](const json& body) {
        if (!body.contains("top_m") || !body["top_m"].is_number_integer())
          fail(ErrorCode::invalid_argument, "next request needs an integer top_m");
        std::vector<int> ids = context_ids(backend, body);
        RankedDistribution dist = backend.next_distribution(ids, body["top_m"].get<int>());
        json entries = json::array();
        for (const DistEntry& e : dist.entries)
          entries.push_back(json::array({e.id, e.surface, e.prob}));
        return json{{"entries", entries}, {"residual", dist.residual}};
      });
    });
  }
};

MockServer::MockServer(MockScript script, std::string host, int port)
    : impl_(std::make_unique<Impl>(std::move(script), std::move(host), port)) {}

MockServer::~MockServer() { stop(); }

void MockServer::start() {
  if (impl_->thread.joinable()) return;
  if (impl_->requested_port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(impl_->host);
    if (impl_->bound_port < 0) fail(ErrorCode::io_error, "could not bind a port for the server");
  } else {
    if (!impl_->server.bind_to_port(impl_->host, impl_->requested_port))
      fail(ErrorCode::io_error,
           "could not bind port " + std::to_string(impl_->requested_port));
    impl_->bound_port = impl_->requested_port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void MockServer::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

bool MockServer::running() const { return impl_->server.is_running(); }

int MockServer::port() const {
  if (impl_->bound_port < 0) fail(ErrorCode::internal, "server has not been started");
  return impl_->bound_port;
}

std::string MockServer::url() const {
  return "http://" + impl_->host + ":" + std::to_string(port());
}

}  // namespace dore
