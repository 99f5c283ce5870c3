#pragma once

// Live completion provider. Only the CLI includes this header; the library
// core stays free of the HTTP dependency. TLS endpoints require building
// with CPPHTTPLIB_OPENSSL_SUPPORT; the default build speaks plain http://
// (e.g. a local gateway).

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>

#include "seqgen/translation.hpp"

namespace seqgen::translation {

// Environment variables:
//   SEQGEN_API_BASE  provider origin, e.g. http://localhost:8080  (required)
//   SEQGEN_API_PATH  completion route, default /v1/chat/completions
//   SEQGEN_API_KEY   bearer token, optional
//   SEQGEN_MODEL     model identifier (required)
class HttpClient : public CompletionClient {
 public:
  HttpClient(std::string base, std::string path, std::string key, std::string model)
      : base_(std::move(base)), path_(std::move(path)), key_(std::move(key)), model_(std::move(model)) {}

  static HttpClient from_env() {
    auto get = [](const char* name) {
      const char* v = std::getenv(name);
      return v ? std::string(v) : std::string();
    };
    std::string base = get("SEQGEN_API_BASE");
    std::string model = get("SEQGEN_MODEL");
    if (base.empty()) throw CorpusError("SEQGEN_API_BASE is not set");
    if (model.empty()) throw CorpusError("SEQGEN_MODEL is not set");
    std::string path = get("SEQGEN_API_PATH");
    if (path.empty()) path = "/v1/chat/completions";
    return HttpClient(std::move(base), std::move(path), get("SEQGEN_API_KEY"), std::move(model));
  }

  std::string complete(const std::string& system, const std::vector<Turn>& turns) override {
    json messages = json::array();
    messages.push_back({{"role", "system"}, {"content", system}});
    for (const auto& t : turns) messages.push_back({{"role", t.role}, {"content", t.content}});
    const std::string body = json{{"model", model_}, {"messages", std::move(messages)}}.dump();

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < 3; ++attempt) {
      httplib::Client cli(base_);
      cli.set_connection_timeout(10);
      cli.set_read_timeout(120);
      httplib::Headers headers;
      if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);
      auto res = cli.Post(path_, headers, body, "application/json");
      if (!res) {
        last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status != 200) {
        last_error = "http " + std::to_string(res->status);
        continue;
      }
      try {
        return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        last_error = std::string("malformed provider response: ") + e.what();
        continue;
      }
    }
    throw TransportError("provider unreachable after 3 attempts: " + last_error);
  }

  std::string decoding() const override { return "provider-default model=" + model_; }

 private:
  std::string base_;
  std::string path_;
  std::string key_;
  std::string model_;
};

}  // namespace seqgen::translation
