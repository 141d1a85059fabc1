#pragma once

// The search -> session -> chat pipeline behind the HTTP API and the CLI.

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "fedqa/config.hpp"
#include "fedqa/federation.hpp"
#include "fedqa/ranking.hpp"
#include "fedqa/sessions.hpp"

namespace fedqa::gateway {

struct SourceStatus {
  std::string id;
  federation::BatchStatus status = federation::BatchStatus::kOk;
  std::string message;
  std::size_t records = 0;
  double latency_seconds = 0.0;
};

struct FacetGroup {
  taxonomy::Facet facet = taxonomy::Facet::kCreativeWork;
  std::vector<ranking::RankedRecord> records;  // rank order
};

struct SearchResult {
  std::string session_id;
  std::string query;
  std::vector<FacetGroup> groups;  // facet enum order, non-empty groups only
  std::vector<SourceStatus> sources;
  double latency_seconds = 0.0;
  std::size_t total_records = 0;   // mapped, before dedup
  std::size_t unique_records = 0;  // after dedup
  std::size_t mapping_failures = 0;
};

struct SupportingDoc {
  std::size_t doc_id = 0;
  std::string title;
  std::vector<std::string> sources;
};

struct ChatResult {
  std::string answer;
  std::vector<SupportingDoc> supporting;
  std::size_t history_len = 0;
};

struct HealthReport {
  std::string status;  // "ok" | "degraded"
  std::map<std::string, bool> sources;
};

class Gateway {
 public:
  Gateway(config::ServiceConfig config, std::shared_ptr<const federation::SourceRegistry> registry,
          std::shared_ptr<const embedding::EmbeddingProvider> embedder, std::shared_ptr<const llm::LlmProvider> llm);

  /// Loads the registry from config.registry_path and builds the providers.
  static std::unique_ptr<Gateway> from_config(config::ServiceConfig config);

  /// Throws kEmptyQuery, kNoSourcesEnabled, kProviderFailure (embedding).
  SearchResult search(std::string_view query);
  /// Throws kSessionNotFound, kEmptyQuestion, kProviderFailure, kPromptTooLarge.
  ChatResult chat(const std::string& session_id, std::string_view question);
  /// Throws kSessionNotFound.
  std::vector<generator::ChatTurn> history(const std::string& session_id);
  HealthReport health() const;

  void reload_registry(std::shared_ptr<const federation::SourceRegistry> registry);
  /// Re-reads config.registry_path.
  void reload_registry();

  const config::ServiceConfig& config() const noexcept { return config_; }
  sessions::SessionStore& sessions() noexcept { return sessions_; }

 private:
  const taxonomy::FieldMap& field_map_for(const federation::SourceDescriptor& d);
  void log_search(const SearchResult& result);

  config::ServiceConfig config_;
  std::shared_ptr<const embedding::EmbeddingProvider> embedder_;
  std::shared_ptr<const llm::LlmProvider> llm_;
  sessions::SessionStore sessions_;

  mutable std::shared_mutex registry_mutex_;
  std::shared_ptr<federation::Federator> federator_;

  std::mutex maps_mutex_;
  std::map<std::string, taxonomy::FieldMap> field_maps_;
  std::mutex telemetry_mutex_;
};

}  // namespace fedqa::gateway
