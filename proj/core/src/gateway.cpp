#include "fedqa/gateway.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <json.hpp>

#include "fedqa/dedup.hpp"
#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"
#include "fedqa/text.hpp"

namespace fedqa::gateway {

using Clock = std::chrono::steady_clock;

Gateway::Gateway(config::ServiceConfig config, std::shared_ptr<const federation::SourceRegistry> registry,
                 std::shared_ptr<const embedding::EmbeddingProvider> embedder,
                 std::shared_ptr<const llm::LlmProvider> llm)
    : config_(std::move(config)),
      embedder_(std::move(embedder)),
      llm_(std::move(llm)),
      sessions_(config_.session_capacity, embedder_, config_.generator.history_capacity, config_.session_journal) {
  config_.validate();
  if (!registry || !llm_) throw Error(ErrorCode::kInvalidArgument, "gateway needs a registry and an LLM provider");
  federator_ = std::make_shared<federation::Federator>(std::move(registry));
}

std::unique_ptr<Gateway> Gateway::from_config(config::ServiceConfig config) {
  auto registry = std::make_shared<const federation::SourceRegistry>(
      config.registry_path.empty() ? federation::SourceRegistry{}
                                   : federation::SourceRegistry::from_file(config.registry_path));
  auto embedder = config::make_embedder(config.embedder);
  auto llm = config::make_llm(config.llm);
  return std::make_unique<Gateway>(std::move(config), std::move(registry), std::move(embedder), std::move(llm));
}

const taxonomy::FieldMap& Gateway::field_map_for(const federation::SourceDescriptor& d) {
  std::lock_guard lock(maps_mutex_);
  const std::string key = d.field_map.empty() ? "adapter:" + (d.adapter.empty() ? std::string("fixture") : d.adapter)
                                              : "file:" + d.field_map;
  auto it = field_maps_.find(key);
  if (it == field_maps_.end()) {
    auto map = d.field_map.empty() ? taxonomy::FieldMap::builtin(d.adapter.empty() ? "fixture" : d.adapter)
                                   : taxonomy::FieldMap::from_file(d.field_map);
    it = field_maps_.emplace(key, std::move(map)).first;
  }
  return it->second;
}

SearchResult Gateway::search(std::string_view raw_query) {
  const auto started = Clock::now();
  const std::string query = text::collapse_whitespace(raw_query);
  if (query.empty()) throw Error(ErrorCode::kEmptyQuery, "query is empty");

  std::shared_ptr<federation::Federator> federator;
  {
    std::shared_lock lock(registry_mutex_);
    federator = federator_;
  }
  const auto response = federator->search_all(query);

  SearchResult result;
  result.query = query;
  std::vector<taxonomy::ScholarlyRecord> mapped;
  for (const auto& batch : response.batches) {
    result.sources.push_back(
        {batch.source_id, batch.status, batch.message, batch.records.size(), batch.latency.count()});
    if (batch.status != federation::BatchStatus::kOk) continue;
    const auto* entry = federator->registry().find(batch.source_id);
    const auto& map = field_map_for(entry->descriptor);
    for (const auto& raw : batch.records) {
      try {
        mapped.push_back(taxonomy::map_record(raw, map));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kMappingFailure) throw;
        ++result.mapping_failures;
      }
    }
  }
  result.total_records = mapped.size();

  auto unique = dedup::deduplicate(mapped, config_.dedup).records();
  result.unique_records = unique.size();
  auto ranked = ranking::rank(query, std::move(unique), config_.bm25);

  std::vector<taxonomy::ScholarlyRecord> ordered;
  ordered.reserve(ranked.size());
  for (const auto& r : ranked) ordered.push_back(r.record);
  auto kb = std::make_shared<const retriever::KnowledgeBase>(retriever::KnowledgeBase::build(ordered, *embedder_));
  result.session_id = sessions_.create(query, std::move(ordered), std::move(kb))->id();

  std::map<taxonomy::Facet, FacetGroup> groups;
  for (auto& r : ranked) {
    auto& g = groups[r.record.facet];
    g.facet = r.record.facet;
    g.records.push_back(std::move(r));
  }
  for (auto& [facet, g] : groups) result.groups.push_back(std::move(g));

  result.latency_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  log_search(result);
  return result;
}

void Gateway::log_search(const SearchResult& result) {
  if (!config_.telemetry_log) return;
  nlohmann::ordered_json line;
  line["ts"] = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
  line["query"] = result.query;
  line["latency_seconds"] = result.latency_seconds;
  line["docs_returned"] = result.unique_records;
  nlohmann::ordered_json per_source = nlohmann::ordered_json::object();
  for (const auto& s : result.sources) per_source[s.id] = s.records;
  line["per_source"] = std::move(per_source);
  std::lock_guard lock(telemetry_mutex_);
  try {
    io::append_line(*config_.telemetry_log, line.dump());
  } catch (const Error& e) {
    spdlog::warn("telemetry write failed: {}", e.what());
  }
}

ChatResult Gateway::chat(const std::string& session_id, std::string_view question) {
  auto session = sessions_.get(session_id);
  const auto answer = session->answer(question, config_.retriever, *embedder_, *llm_, config_.generator);
  sessions_.record_turn(session_id, answer.turn);

  ChatResult out;
  out.answer = answer.text;
  out.history_len = answer.history_len;
  const auto& docs = session->knowledge_base().documents();
  for (auto id : answer.supporting_doc_ids) {
    const auto& rec = session->records().at(docs.at(id).record_ref);
    out.supporting.push_back({id, rec.title, {rec.source_ids.begin(), rec.source_ids.end()}});
  }
  return out;
}

std::vector<generator::ChatTurn> Gateway::history(const std::string& session_id) {
  return sessions_.get(session_id)->history();
}

HealthReport Gateway::health() const {
  std::shared_lock lock(registry_mutex_);
  HealthReport report;
  for (const auto& d : federator_->registry().list_sources()) report.sources[d.id] = d.enabled;
  report.status = federator_->registry().enabled_count() > 0 ? "ok" : "degraded";
  return report;
}

void Gateway::reload_registry(std::shared_ptr<const federation::SourceRegistry> registry) {
  if (!registry) throw Error(ErrorCode::kInvalidArgument, "null registry");
  auto fresh = std::make_shared<federation::Federator>(std::move(registry));
  {
    std::lock_guard lock(maps_mutex_);
    field_maps_.clear();
  }
  std::unique_lock lock(registry_mutex_);
  federator_ = std::move(fresh);
}

void Gateway::reload_registry() {
  if (config_.registry_path.empty()) throw Error(ErrorCode::kInvalidConfig, "no registry path configured");
  reload_registry(
      std::make_shared<const federation::SourceRegistry>(federation::SourceRegistry::from_file(config_.registry_path)));
}

}  // namespace fedqa::gateway
