// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reclink/mock_models.hpp"

namespace reclink {

enum class GatewayMode { kMock, kRemote };

struct GatewayConfig {
  GatewayMode mode = GatewayMode::kMock;
  std::optional<std::string> base_url;  // required for kRemote
  std::string embed_model = "mock-embed";
  std::string rerank_model = "mock-rerank";
  std::string select_model = "mock-select";
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  /// Wait before retry i; the last entry repeats if retries exceed the list.
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(250),
                                                 std::chrono::milliseconds(1000)};
  std::size_t mock_dim = mock::kDefaultEmbedDim;
  std::uint64_t mock_seed = 0;

  /// Throws Error(kConfig) when remote mode lacks a base URL.
  void validate() const;
};

struct HealthStatus {
  bool ok = false;
  std::vector<std::string> models;
};

/// Request counters, for cache verification and progress reporting.
struct GatewayStats {
  std::uint64_t embed_requests = 0;
  std::uint64_t embed_texts = 0;
  std::uint64_t rerank_requests = 0;
  std::uint64_t rerank_pairs = 0;
  std::uint64_t select_requests = 0;
};

/// Handle on the three model roles. Implementations must be callable from
/// several threads at once.
class ModelGateway {
 public:
  virtual ~ModelGateway() = default;

  /// One vector per text, all of one dimension. `texts` must be nonempty.
  std::vector<std::vector<float>> embed(std::span<const std::string> texts,
                                        const std::string& model);
  /// One raw score per candidate, in listed order. Range checks are the
  /// caller's job.
  std::vector<double> rerank(const std::string& query, std::span<const std::string> candidates,
                             const std::string& model);
  /// 1-based index into `candidates`. Throws Error(kSelectParse) on a reply
  /// that is not an integer in range.
  std::size_t select(const std::string& query, std::span<const std::string> candidates,
                     const std::string& model);
  virtual HealthStatus health() = 0;

  GatewayStats stats() const;

 protected:
  virtual std::vector<std::vector<float>> do_embed(std::span<const std::string> texts,
                                                   const std::string& model) = 0;
  virtual std::vector<double> do_rerank(const std::string& query,
                                        std::span<const std::string> candidates,
                                        const std::string& model) = 0;
  virtual std::size_t do_select(const std::string& query, std::span<const std::string> candidates,
                                const std::string& model) = 0;

 private:
  std::atomic<std::uint64_t> embed_requests_{0};
  std::atomic<std::uint64_t> embed_texts_{0};
  std::atomic<std::uint64_t> rerank_requests_{0};
  std::atomic<std::uint64_t> rerank_pairs_{0};
  std::atomic<std::uint64_t> select_requests_{0};
};

/// In-process deterministic backends; never touches the network.
class MockGateway final : public ModelGateway {
 public:
  explicit MockGateway(GatewayConfig config = {});

  HealthStatus health() override;

 protected:
  std::vector<std::vector<float>> do_embed(std::span<const std::string> texts,
                                           const std::string& model) override;
  std::vector<double> do_rerank(const std::string& query, std::span<const std::string> candidates,
                                const std::string& model) override;
  std::size_t do_select(const std::string& query, std::span<const std::string> candidates,
                        const std::string& model) override;

 private:
  GatewayConfig config_;
};

/// HTTP/1.1 + JSON client for the model-serving protocol:
///
///   POST /v1/embed   {"id","model","texts"}              -> {"id","dim","embeddings"}
///   POST /v1/rerank  {"id","model","query","candidates"} -> {"id","scores"}
///   POST /v1/select  {"id","model","query","candidates"} -> {"id","index"}
///   GET  /v1/health                                      -> {"status","models"}
///
/// Every request carries a client-generated id that the server must echo.
/// Network failures and 5xx replies are retried with backoff; 4xx replies are
/// reported immediately as protocol errors.
class RemoteGateway final : public ModelGateway {
 public:
  explicit RemoteGateway(GatewayConfig config);

  HealthStatus health() override;

 protected:
  std::vector<std::vector<float>> do_embed(std::span<const std::string> texts,
                                           const std::string& model) override;
  std::vector<double> do_rerank(const std::string& query, std::span<const std::string> candidates,
                                const std::string& model) override;
  std::size_t do_select(const std::string& query, std::span<const std::string> candidates,
                        const std::string& model) override;

 private:
  std::string next_request_id();

  GatewayConfig config_;
  std::string id_prefix_;
  std::atomic<std::uint64_t> counter_{0};
};

std::unique_ptr<ModelGateway> make_gateway(const GatewayConfig& config);

/// health() on a gateway built from `config`. Throws kBackendUnavailable when
/// a remote server cannot be reached.
HealthStatus health_check(const GatewayConfig& config);

}  // namespace reclink
