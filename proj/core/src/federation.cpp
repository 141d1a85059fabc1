#include "fedqa/federation.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <future>
#include <json.hpp>

#include "fedqa/connectors.hpp"
#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"
#include "fedqa/text.hpp"

namespace fedqa::federation {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(SourceKind kind) noexcept {
  return kind == SourceKind::kFixture ? "fixture" : "remote";
}

std::string_view to_string(BatchStatus status) noexcept {
  switch (status) {
    case BatchStatus::kOk: return "ok";
    case BatchStatus::kTimeout: return "timeout";
    case BatchStatus::kError: return "error";
  }
  return "error";
}

void SourceDescriptor::validate() const {
  if (text::trim(id).empty()) throw Error(ErrorCode::kInvalidDescriptor, "source id must be non-empty");
  if (!(timeout.count() > 0.0)) {
    throw Error(ErrorCode::kInvalidDescriptor, "source '" + id + "' timeout must be positive");
  }
  if (fixture_delay.count() < 0.0) {
    throw Error(ErrorCode::kInvalidDescriptor, "source '" + id + "' fixture delay must be >= 0");
  }
}

bool operator==(const SourceRecord& a, const SourceRecord& b) {
  return a.source_id == b.source_id && a.native_fields == b.native_fields;
}

std::size_t FederatedResponse::record_count() const noexcept {
  std::size_t total = 0;
  for (const auto& batch : batches) total += batch.records.size();
  return total;
}

// ---------------------------------------------------------------- registry

void SourceRegistry::register_source(SourceDescriptor descriptor) {
  descriptor.validate();
  auto connector = make_connector(descriptor);
  register_source(std::move(descriptor), std::move(connector));
}

void SourceRegistry::register_source(SourceDescriptor descriptor, std::shared_ptr<Connector> connector) {
  descriptor.validate();
  if (!connector) throw Error(ErrorCode::kInvalidDescriptor, "source '" + descriptor.id + "' has no connector");
  if (entries_.contains(descriptor.id)) {
    throw Error(ErrorCode::kDuplicateSourceId, "source id already registered: " + descriptor.id);
  }
  std::string id = descriptor.id;
  entries_.emplace(std::move(id), Entry{std::move(descriptor), std::move(connector)});
}

std::vector<SourceDescriptor> SourceRegistry::list_sources() const {
  std::vector<SourceDescriptor> out;
  out.reserve(entries_.size());
  for (const auto& [id, entry] : entries_) out.push_back(entry.descriptor);
  return out;
}

const SourceRegistry::Entry* SourceRegistry::find(std::string_view id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

void SourceRegistry::set_enabled(std::string_view id, bool enabled) {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::kUnknownSource, "unknown source: " + std::string(id));
  it->second.descriptor.enabled = enabled;
}

std::size_t SourceRegistry::enabled_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const auto& kv) { return kv.second.descriptor.enabled; }));
}

namespace {

SourceDescriptor descriptor_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "source descriptor must be an object");
  SourceDescriptor d;
  d.id = j.value("id", "");
  d.display_name = j.value("display_name", d.id);
  const std::string kind = j.value("kind", "fixture");
  if (kind == "fixture") {
    d.kind = SourceKind::kFixture;
  } else if (kind == "remote") {
    d.kind = SourceKind::kRemote;
  } else {
    throw Error(ErrorCode::kInvalidDescriptor, "unknown source kind '" + kind + "' for " + d.id);
  }
  d.endpoint = j.value("endpoint", "");
  if (d.kind == SourceKind::kFixture && !d.endpoint.empty() && !base_dir.empty()) {
    std::filesystem::path dir(d.endpoint);
    if (dir.is_relative()) d.endpoint = (base_dir / dir).lexically_normal().string();
  }
  d.timeout = Seconds{j.value("timeout", 15.0)};
  d.enabled = j.value("enabled", true);
  d.adapter = j.value("adapter", "");
  d.fixture_delay = Seconds{j.value("delay", 0.0)};
  d.token_env = j.value("token_env", "");
  d.max_results = j.value("max_results", 50);
  d.field_map = j.value("field_map", "");
  if (!d.field_map.empty() && !base_dir.empty() && std::filesystem::path(d.field_map).is_relative()) {
    d.field_map = (base_dir / d.field_map).lexically_normal().string();
  }
  return d;
}

}  // namespace

SourceRegistry SourceRegistry::from_json_text(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("source registry is not valid JSON: ") + e.what());
  }
  const json* list = &root;
  if (root.is_object()) {
    if (!root.contains("sources")) throw Error(ErrorCode::kInvalidConfig, "registry object lacks 'sources'");
    list = &root.at("sources");
  }
  if (!list->is_array()) throw Error(ErrorCode::kInvalidConfig, "registry sources must be an array");
  SourceRegistry registry;
  for (const auto& item : *list) registry.register_source(descriptor_from_json(item, base_dir));
  return registry;
}

SourceRegistry SourceRegistry::from_file(const std::filesystem::path& path) {
  return from_json_text(io::read_file(path), path.parent_path());
}

// ---------------------------------------------------------------- federator

Federator::Federator(std::shared_ptr<const SourceRegistry> registry, FederationOptions options)
    : registry_(std::move(registry)), options_(options) {
  if (!registry_) throw Error(ErrorCode::kInvalidArgument, "federator needs a registry");
  if (options_.max_parallel == 0) options_.max_parallel = 1;
}

Federator::~Federator() {
  std::lock_guard lock(stragglers_mutex_);
  // jthread requests stop and joins; connectors honour the stop token.
  stragglers_.clear();
}

void Federator::reap_stragglers() {
  std::lock_guard lock(stragglers_mutex_);
  std::erase_if(stragglers_, [](const Straggler& s) { return s.done->load(); });
}

SourceBatch Federator::run_one(const SourceRegistry::Entry& entry, const std::string& query) {
  SourceBatch batch;
  batch.source_id = entry.descriptor.id;

  std::promise<std::vector<SourceRecord>> promise;
  auto future = promise.get_future();
  auto done = std::make_shared<std::atomic<bool>>(false);
  const auto started = Clock::now();
  const auto deadline = started + std::chrono::duration_cast<Clock::duration>(entry.descriptor.timeout);

  std::jthread worker([connector = entry.connector, query, promise = std::move(promise), done](
                          std::stop_token stop) mutable {
    try {
      promise.set_value(connector->fetch(query, stop));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
    done->store(true);
  });

  if (future.wait_until(deadline) == std::future_status::ready) {
    batch.latency = Clock::now() - started;
    try {
      batch.records = future.get();
      batch.status = BatchStatus::kOk;
    } catch (const std::exception& e) {
      batch.status = BatchStatus::kError;
      batch.message = e.what();
    }
    worker.join();
    return batch;
  }

  batch.latency = Clock::now() - started;
  batch.status = BatchStatus::kTimeout;
  batch.message = "no response within " + std::to_string(entry.descriptor.timeout.count()) + " s";
  worker.request_stop();
  spdlog::warn("source {} timed out after {:.3f} s", entry.descriptor.id, batch.latency.count());
  std::lock_guard lock(stragglers_mutex_);
  stragglers_.push_back(Straggler{std::move(worker), std::move(done)});
  return batch;
}

SourceBatch Federator::fetch_source(std::string_view source_id, std::string_view query) {
  const auto* entry = registry_->find(source_id);
  if (entry == nullptr) throw Error(ErrorCode::kUnknownSource, "unknown source: " + std::string(source_id));
  const std::string trimmed(text::trim(query));
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyQuery, "query must be non-empty");
  if (!entry->descriptor.enabled) {
    SourceBatch batch;
    batch.source_id = entry->descriptor.id;
    batch.status = BatchStatus::kError;
    batch.message = "source disabled";
    return batch;
  }
  reap_stragglers();
  return run_one(*entry, trimmed);
}

FederatedResponse Federator::search_all(std::string_view query) {
  const std::string trimmed(text::trim(query));
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyQuery, "query must be non-empty");

  std::vector<const SourceRegistry::Entry*> sources;
  for (const auto& descriptor : registry_->list_sources()) {
    if (descriptor.enabled) sources.push_back(registry_->find(descriptor.id));
  }
  if (sources.empty()) throw Error(ErrorCode::kNoSourcesEnabled, "no sources are enabled");

  reap_stragglers();
  const auto started = Clock::now();

  FederatedResponse response;
  response.query = trimmed;
  response.batches.resize(sources.size());

  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next.fetch_add(1); i < sources.size(); i = next.fetch_add(1)) {
      response.batches[i] = run_one(*sources[i], trimmed);
    }
  };
  const std::size_t workers = std::min(options_.max_parallel, sources.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  }

  response.total_latency = Clock::now() - started;
  return response;
}

}  // namespace fedqa::federation
