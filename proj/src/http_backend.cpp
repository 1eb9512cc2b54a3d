#include "dore/http_backend.hpp"

#include "dore/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace dore {

namespace {

using nlohmann::json;

json post_json(const std::string& base_url, const std::string& path, const json& body) {
  httplib::Client client(base_url);
  client.set_read_timeout(30, 0);
  auto result = client.Post(path, body.dump(), "application/json");
  if (!result)
    fail(ErrorCode::backend_error,
         "backend unreachable at " + base_url + path + ": " + httplib::to_string(result.error()));
  json parsed;
  try {
    parsed = json::parse(result->body);
  } catch (const json::exception&) {
    fail(ErrorCode::backend_error, "backend returned malformed data from " + path);
  }
  if (result->status != 200) {
    std::string message = parsed.is_object() && parsed.contains("error")
                              ? parsed["error"].get<std::string>()
                              : "status " + std::to_string(result->status);
    fail(ErrorCode::backend_error, "backend rejected " + path + ": " + message);
  }
  return parsed;
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url) : base_url_(std::move(base_url)) {
  info_.name = "http:" + base_url_;
  httplib::Client client(base_url_);
  client.set_read_timeout(30, 0);
  auto result = client.Get("/v1/info");
  if (!result)
    fail(ErrorCode::backend_error,
         "backend unreachable at " + base_url_ + ": " + httplib::to_string(result.error()));
  if (result->status == 200) {
    try {
      json j = json::parse(result->body);
      info_.vocab_size = j.value("vocab_size", -1);
      info_.eos_id = j.value("eos_id", -1);
      info_.max_context = j.value("max_context", -1);
      info_.max_top_m = j.value("max_top_m", -1);
      info_.serialized = j.value("serialized", false);
    } catch (const json::exception&) {
      fail(ErrorCode::backend_error, "backend returned a malformed capability record");
    }
  }
  // A missing /v1/info is tolerated: the defaults declare every limit unknown.
}

BackendInfo HttpBackend::info() const { return info_; }

TokenSequence HttpBackend::tokenize(const std::string& text) const {
  json reply = post_json(base_url_, "/v1/tokenize", json{{"text", text}});
  if (!reply.contains("tokens") || !reply["tokens"].is_array())
    fail(ErrorCode::backend_error, "tokenize reply lacks a tokens array");
  TokenSequence tokens;
  for (const auto& t : reply["tokens"]) {
    if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_string())
      fail(ErrorCode::backend_error, "tokenize reply entries must be [id, surface] pairs");
    tokens.push_back({t[0].get<int>(), t[1].get<std::string>()});
  }
  return tokens;
}

std::string HttpBackend::detokenize(std::span<const Token> tokens) const {
  return join_surfaces(tokens);
}

RankedDistribution HttpBackend::next_distribution(std::span<const int> context,
                                                  int top_m) const {
  json body{{"context", std::vector<int>(context.begin(), context.end())}, {"top_m", top_m}};
  json reply = post_json(base_url_, "/v1/next", body);
  if (!reply.contains("entries") || !reply["entries"].is_array())
    fail(ErrorCode::backend_error, "next reply lacks an entries array");

  RankedDistribution dist;
  dist.context_length = context.size();
  dist.residual = reply.value("residual", 0.0);
  for (const auto& e : reply["entries"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_string() ||
        !e[2].is_number())
      fail(ErrorCode::backend_error, "next reply entries must be [id, surface, prob] triples");
    dist.entries.push_back({e[0].get<int>(), e[1].get<std::string>(), e[2].get<double>()});
  }
  dist.validate();
  return dist;
}

}  // namespace dore
