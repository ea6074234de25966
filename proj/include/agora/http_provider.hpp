#pragma once

// HTTP-backed providers speaking the ubiquitous chat-completions and
// embeddings wire shapes. Split out of gateway.hpp so binaries that only
// need offline providers do not pull in the HTTP/TLS stack.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "agora/embedding.hpp"
#include "agora/errors.hpp"
#include "agora/gateway.hpp"

namespace agora {

namespace detail {

// Splits "https://host:port/some/path" into (scheme://host:port, /some/path).
inline std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline void raise_http_status(int status, const std::string& body) {
  if (status == 401 || status == 403) throw AuthError("authentication failed: " + body);
  if (status == 429) throw RateLimited("rate limited: " + body);
  throw ProviderError(status, body);
}

}  // namespace detail

class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string provider_name, std::string endpoint_url, std::string api_key,
                   int timeout_seconds = 120)
      : name_(std::move(provider_name)),
        api_key_(std::move(api_key)),
        timeout_seconds_(timeout_seconds) {
    std::tie(base_, path_) = detail::split_url(endpoint_url);
  }

  std::string name() const override { return name_; }

  std::string generate(const GenerationRequest& req) override {
    nlohmann::json payload{
        {"model", req.model_id},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})}};
    if (req.temperature) payload["temperature"] = *req.temperature;
    if (req.max_output_tokens) payload["max_tokens"] = *req.max_output_tokens;

    httplib::Client client(base_);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_connection_timeout(10, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_, headers, payload.dump(), "application/json");
    if (!res) {
      if (res.error() == httplib::Error::ConnectionTimeout ||
          res.error() == httplib::Error::Read)
        throw Timeout("request to " + base_ + " timed out");
      throw ProviderError("transport failure talking to " + base_ + ": " +
                          httplib::to_string(res.error()));
    }
    if (res->status != 200) detail::raise_http_status(res->status, res->body);

    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("malformed completion response: ") + e.what());
    }
  }

 private:
  std::string name_;
  std::string base_;
  std::string path_;
  std::string api_key_;
  int timeout_seconds_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string model, std::string endpoint_url, std::string api_key,
                        std::size_t dimension, int timeout_seconds = 120)
      : model_(std::move(model)),
        api_key_(std::move(api_key)),
        dimension_(dimension),
        timeout_seconds_(timeout_seconds) {
    std::tie(base_, path_) = detail::split_url(endpoint_url);
  }

  std::string name() const override { return "http:" + model_; }
  std::size_t dimension() const override { return dimension_; }

  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) override {
    nlohmann::json payload{{"model", model_}, {"input", texts}};
    httplib::Client client(base_);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_, headers, payload.dump(), "application/json");
    if (!res) throw Timeout("embedding request to " + base_ + " failed");
    if (res->status != 200) detail::raise_http_status(res->status, res->body);

    try {
      auto j = nlohmann::json::parse(res->body);
      std::vector<std::vector<double>> out;
      for (const auto& item : j.at("data"))
        out.push_back(item.at("embedding").get<std::vector<double>>());
      if (out.size() != texts.size())
        throw ProviderError("embedding batch size mismatch");
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("malformed embedding response: ") + e.what());
    }
  }

 private:
  std::string model_;
  std::string base_;
  std::string path_;
  std::string api_key_;
  std::size_t dimension_;
  int timeout_seconds_;
};

}  // namespace agora
