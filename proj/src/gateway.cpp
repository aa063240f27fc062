// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/gateway.hpp"

#include <cstdio>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "reclink/error.hpp"

namespace reclink {
namespace {

using json = nlohmann::json;

std::string error_body_text(const std::string& body) {
  try {
    const json parsed = json::parse(body);
    const json& err = parsed.at("error");
    return err.value("code", std::string("unknown")) + ": " + err.value("message", std::string());
  } catch (const std::exception&) {
    return body.substr(0, 200);
  }
}

class Exchange {
 public:
  explicit Exchange(const GatewayConfig& config) : config_(config) {}

  json get(const std::string& path) const { return run(path, nullptr); }
  json post(const std::string& path, const json& body) const { return run(path, &body); }

 private:
  json run(const std::string& path, const json* body) const {
    const std::string payload =
        body ? body->dump(-1, ' ', false, json::error_handler_t::replace) : std::string();
    std::string last_failure;
    const int attempts = std::max(0, config_.retries) + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0 && !config_.backoff.empty()) {
        const auto i = std::min<std::size_t>(attempt - 1, config_.backoff.size() - 1);
        std::this_thread::sleep_for(config_.backoff[i]);
      }
      httplib::Client client(*config_.base_url);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());

      auto res = body ? client.Post(path, payload, "application/json") : client.Get(path);
      if (!res) {
        last_failure = "network error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status) + " " + error_body_text(res->body);
        continue;
      }
      if (res->status >= 400) {
        throw Error(ErrorKind::kProtocol, path + " rejected with HTTP " +
                                              std::to_string(res->status) + " " +
                                              error_body_text(res->body));
      }
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw Error(ErrorKind::kProtocol, path + " returned malformed JSON: " + e.what());
      }
    }
    throw Error(ErrorKind::kBackendUnavailable,
                *config_.base_url + path + " unavailable after " + std::to_string(attempts) +
                    " attempts: " + last_failure);
  }

  const GatewayConfig& config_;
};

void check_echo(const json& reply, const std::string& id, const std::string& path) {
  const auto it = reply.find("id");
  if (it == reply.end() || !it->is_string() || it->get<std::string>() != id) {
    throw Error(ErrorKind::kProtocol, path + " reply id does not echo request id " + id);
  }
}

template <typename T>
T field(const json& reply, const char* name, const std::string& path) {
  try {
    return reply.at(name).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kProtocol, path + " reply has bad '" + name + "': " + e.what());
  }
}

}  // namespace

void GatewayConfig::validate() const {
  if (mode == GatewayMode::kRemote && (!base_url || base_url->empty())) {
    throw Error(ErrorKind::kConfig, "remote gateway mode requires a base URL");
  }
  if (mock_dim == 0) throw Error(ErrorKind::kConfig, "mock embedding dim must be positive");
}

std::vector<std::vector<float>> ModelGateway::embed(std::span<const std::string> texts,
                                                    const std::string& model) {
  if (texts.empty()) throw Error(ErrorKind::kConfig, "embed requires at least one text");
  ++embed_requests_;
  embed_texts_ += texts.size();
  auto vectors = do_embed(texts, model);
  if (vectors.size() != texts.size()) {
    throw Error(ErrorKind::kProtocol, "embed returned " + std::to_string(vectors.size()) +
                                          " vectors for " + std::to_string(texts.size()) +
                                          " texts");
  }
  for (const auto& v : vectors) {
    if (v.size() != vectors.front().size() || v.empty()) {
      throw Error(ErrorKind::kProtocol, "embed returned vectors of inconsistent dimension");
    }
  }
  return vectors;
}

std::vector<double> ModelGateway::rerank(const std::string& query,
                                         std::span<const std::string> candidates,
                                         const std::string& model) {
  if (candidates.empty()) throw Error(ErrorKind::kConfig, "rerank requires at least one candidate");
  ++rerank_requests_;
  rerank_pairs_ += candidates.size();
  auto scores = do_rerank(query, candidates, model);
  if (scores.size() != candidates.size()) {
    throw Error(ErrorKind::kProtocol, "rerank returned " + std::to_string(scores.size()) +
                                          " scores for " + std::to_string(candidates.size()) +
                                          " candidates");
  }
  return scores;
}

std::size_t ModelGateway::select(const std::string& query, std::span<const std::string> candidates,
                                 const std::string& model) {
  if (candidates.empty()) throw Error(ErrorKind::kConfig, "select requires at least one candidate");
  ++select_requests_;
  const std::size_t index = do_select(query, candidates, model);
  if (index < 1 || index > candidates.size()) {
    throw Error(ErrorKind::kSelectParse, "select index " + std::to_string(index) +
                                             " outside 1.." + std::to_string(candidates.size()));
  }
  return index;
}

GatewayStats ModelGateway::stats() const {
  return {embed_requests_.load(), embed_texts_.load(), rerank_requests_.load(),
          rerank_pairs_.load(), select_requests_.load()};
}

MockGateway::MockGateway(GatewayConfig config) : config_(std::move(config)) {
  config_.validate();
}

HealthStatus MockGateway::health() {
  return {true, {config_.embed_model, config_.rerank_model, config_.select_model}};
}

std::vector<std::vector<float>> MockGateway::do_embed(std::span<const std::string> texts,
                                                      const std::string&) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(mock::embed(t, config_.mock_dim, config_.mock_seed));
  return out;
}

std::vector<double> MockGateway::do_rerank(const std::string& query,
                                           std::span<const std::string> candidates,
                                           const std::string&) {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const std::string& c : candidates) out.push_back(mock::rerank_score(query, c));
  return out;
}

std::size_t MockGateway::do_select(const std::string& query,
                                   std::span<const std::string> candidates, const std::string&) {
  return mock::select(query, candidates);
}

RemoteGateway::RemoteGateway(GatewayConfig config) : config_(std::move(config)) {
  config_.mode = GatewayMode::kRemote;
  config_.validate();
  std::random_device rd;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%08x%08x", rd(), rd());
  id_prefix_ = buf;
}

std::string RemoteGateway::next_request_id() {
  return id_prefix_ + "-" + std::to_string(counter_.fetch_add(1) + 1);
}

HealthStatus RemoteGateway::health() {
  const json reply = Exchange(config_).get("/v1/health");
  HealthStatus status;
  status.ok = reply.value("status", std::string()) == "ok";
  status.models = field<std::vector<std::string>>(reply, "models", "/v1/health");
  return status;
}

std::vector<std::vector<float>> RemoteGateway::do_embed(std::span<const std::string> texts,
                                                        const std::string& model) {
  const std::string id = next_request_id();
  const json request = {{"id", id}, {"model", model}, {"texts", texts}};
  const json reply = Exchange(config_).post("/v1/embed", request);
  check_echo(reply, id, "/v1/embed");
  const auto dim = field<long long>(reply, "dim", "/v1/embed");
  auto vectors = field<std::vector<std::vector<float>>>(reply, "embeddings", "/v1/embed");
  for (const auto& v : vectors) {
    if (static_cast<long long>(v.size()) != dim) {
      throw Error(ErrorKind::kProtocol, "/v1/embed vector length " + std::to_string(v.size()) +
                                            " differs from advertised dim " + std::to_string(dim));
    }
  }
  return vectors;
}

std::vector<double> RemoteGateway::do_rerank(const std::string& query,
                                             std::span<const std::string> candidates,
                                             const std::string& model) {
  const std::string id = next_request_id();
  const json request = {{"id", id}, {"model", model}, {"query", query}, {"candidates", candidates}};
  const json reply = Exchange(config_).post("/v1/rerank", request);
  check_echo(reply, id, "/v1/rerank");
  return field<std::vector<double>>(reply, "scores", "/v1/rerank");
}

std::size_t RemoteGateway::do_select(const std::string& query,
                                     std::span<const std::string> candidates,
                                     const std::string& model) {
  const std::string id = next_request_id();
  const json request = {{"id", id}, {"model", model}, {"query", query}, {"candidates", candidates}};
  const json reply = Exchange(config_).post("/v1/select", request);
  check_echo(reply, id, "/v1/select");
  const auto it = reply.find("index");
  if (it == reply.end() || !it->is_number_integer()) {
    throw Error(ErrorKind::kSelectParse, "/v1/select reply index is not an integer");
  }
  const auto index = it->get<long long>();
  if (index < 1 || index > static_cast<long long>(candidates.size())) {
    throw Error(ErrorKind::kSelectParse, "/v1/select index " + std::to_string(index) +
                                             " outside 1.." + std::to_string(candidates.size()));
  }
  return static_cast<std::size_t>(index);
}

std::unique_ptr<ModelGateway> make_gateway(const GatewayConfig& config) {
  config.validate();
  if (config.mode == GatewayMode::kRemote) return std::make_unique<RemoteGateway>(config);
  return std::make_unique<MockGateway>(config);
}

HealthStatus health_check(const GatewayConfig& config) {
  return make_gateway(config)->health();
}

}  // namespace reclink
