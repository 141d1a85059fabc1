#pragma once

// Concurrent fan-out of one keyword query to every registered source.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace fedqa::federation {

using Seconds = std::chrono::duration<double>;

enum class SourceKind { kFixture, kRemote };

std::string_view to_string(SourceKind kind) noexcept;

struct SourceDescriptor {
  std::string id;
  std::string display_name;
  SourceKind kind = SourceKind::kFixture;
  /// Directory for fixture sources, base URL for remote ones.
  std::string endpoint;
  Seconds timeout{15.0};
  bool enabled = true;

  /// Response parser: "fixture", "dblp", "openalex" or "zenodo". Empty picks
  /// "fixture" for fixture sources.
  std::string adapter;
  /// Artificial latency injected by fixture sources (tests, demos).
  Seconds fixture_delay{0.0};
  /// Name of the environment variable holding an optional bearer token.
  std::string token_env;
  /// Page size requested from remote endpoints.
  int max_results = 50;
  /// Optional path to a field-map JSON overriding the adapter default.
  std::string field_map;

  /// Throws Error(kInvalidDescriptor) on an empty id or non-positive timeout.
  void validate() const;
};

/// A native value is either a scalar string or a list of strings.
using FieldValue = std::variant<std::string, std::vector<std::string>>;
using NativeFields = std::vector<std::pair<std::string, FieldValue>>;

struct SourceRecord {
  std::string source_id;
  NativeFields native_fields;  // payload order, byte-exact values
  std::chrono::system_clock::time_point fetched_at;
};

bool operator==(const SourceRecord& a, const SourceRecord& b);

enum class BatchStatus { kOk, kTimeout, kError };

std::string_view to_string(BatchStatus status) noexcept;

struct SourceBatch {
  std::string source_id;
  BatchStatus status = BatchStatus::kOk;
  std::string message;  // populated for kError
  std::vector<SourceRecord> records;
  Seconds latency{0.0};
};

struct FederatedResponse {
  std::string query;
  std::vector<SourceBatch> batches;  // ordered by source id
  Seconds total_latency{0.0};

  std::size_t record_count() const noexcept;
};

/// One data source. Implementations must be callable concurrently and should
/// return promptly once `stop` is requested.
class Connector {
 public:
  virtual ~Connector() = default;
  virtual std::vector<SourceRecord> fetch(const std::string& query, std::stop_token stop) = 0;
};

class SourceRegistry {
 public:
  struct Entry {
    SourceDescriptor descriptor;
    std::shared_ptr<Connector> connector;
  };

  /// Builds the connector from the descriptor (see connectors.hpp).
  void register_source(SourceDescriptor descriptor);
  void register_source(SourceDescriptor descriptor, std::shared_ptr<Connector> connector);

  /// Sorted by id.
  std::vector<SourceDescriptor> list_sources() const;
  const Entry* find(std::string_view id) const;
  void set_enabled(std::string_view id, bool enabled);
  std::size_t enabled_count() const noexcept;
  std::size_t size() const noexcept { return entries_.size(); }

  /// Accepts either a top-level array of descriptors or {"sources": [...]}.
  /// Relative fixture directories resolve against `base_dir`.
  static SourceRegistry from_json_text(std::string_view json,
                                       const std::filesystem::path& base_dir = {});
  static SourceRegistry from_file(const std::filesystem::path& path);

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

struct FederationOptions {
  std::size_t max_parallel = 8;
};

class Federator {
 public:
  explicit Federator(std::shared_ptr<const SourceRegistry> registry, FederationOptions options = {});
  ~Federator();

  Federator(const Federator&) = delete;
  Federator& operator=(const Federator&) = delete;

  /// Failures of the source itself are reported in the batch status, never
  /// thrown. Throws kUnknownSource and kEmptyQuery only.
  SourceBatch fetch_source(std::string_view source_id, std::string_view query);

  /// One batch per enabled source, ordered by source id. Throws kEmptyQuery
  /// and kNoSourcesEnabled.
  FederatedResponse search_all(std::string_view query);

  const SourceRegistry& registry() const noexcept { return *registry_; }

 private:
  SourceBatch run_one(const SourceRegistry::Entry& entry, const std::string& query);
  void reap_stragglers();

  struct Straggler {
    std::jthread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  std::shared_ptr<const SourceRegistry> registry_;
  FederationOptions options_;
  std::mutex stragglers_mutex_;
  std::vector<Straggler> stragglers_;
};

}  // namespace fedqa::federation
