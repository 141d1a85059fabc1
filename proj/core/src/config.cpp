#include "fedqa/config.hpp"

#include <json.hpp>

#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"

namespace fedqa::config {

using json = nlohmann::json;

namespace {

std::filesystem::path resolve(const std::string& raw, const std::filesystem::path& base_dir) {
  std::filesystem::path p(raw);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p.lexically_normal();
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidConfig, "port out of range");
  if (session_capacity < 1) throw Error(ErrorCode::kInvalidConfig, "session_capacity must be at least 1");
  dedup.validate();
  bm25.validate();
  retriever.validate();
  generator.validate();
  if (embedder.kind != "local" && embedder.kind != "remote") {
    throw Error(ErrorCode::kInvalidConfig, "embedder.kind must be local or remote");
  }
  if (embedder.kind == "remote" && embedder.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "remote embedder needs an endpoint");
  }
  if (llm.kind != "stub" && llm.kind != "remote") throw Error(ErrorCode::kInvalidConfig, "llm.kind must be stub or remote");
  if (llm.kind == "remote" && llm.endpoint.empty()) throw Error(ErrorCode::kInvalidConfig, "remote llm needs an endpoint");
}

ServiceConfig ServiceConfig::from_json_text(std::string_view text, const std::filesystem::path& base_dir) {
  ServiceConfig c;
  try {
    const auto j = json::parse(text);
    read(j, "host", c.host);
    read(j, "port", c.port);
    if (j.contains("registry")) c.registry_path = resolve(j.at("registry").get<std::string>(), base_dir);
    if (j.contains("dedup")) {
      const auto& d = j.at("dedup");
      read(d, "title", c.dedup.title);
      read(d, "authors", c.dedup.authors);
      read(d, "abstract", c.dedup.abstract);
      read(d, "date", c.dedup.date);
      read(d, "threshold", c.dedup.merge_threshold);
    }
    if (j.contains("ranking")) {
      const auto& r = j.at("ranking");
      read(r, "k1", c.bm25.k1);
      read(r, "b", c.bm25.b);
      read(r, "delta", c.bm25.delta);
    }
    if (j.contains("retriever")) {
      const auto& r = j.at("retriever");
      read(r, "tfidf_weight", c.retriever.tfidf_weight);
      read(r, "knn_weight", c.retriever.knn_weight);
      read(r, "svm_weight", c.retriever.svm_weight);
      read(r, "top_k", c.retriever.top_k);
      read(r, "rrf_constant", c.retriever.rrf_constant);
      if (r.contains("fusion")) {
        const auto f = r.at("fusion").get<std::string>();
        if (f == "rrf") {
          c.retriever.fusion = retriever::FusionMethod::kReciprocalRank;
        } else if (f == "weighted") {
          c.retriever.fusion = retriever::FusionMethod::kWeightedScore;
        } else {
          throw Error(ErrorCode::kInvalidConfig, "retriever.fusion must be rrf or weighted");
        }
      }
      read(r, "svm_lambda", c.retriever.svm.lambda);
      read(r, "svm_learning_rate", c.retriever.svm.learning_rate);
      read(r, "svm_iterations", c.retriever.svm.iterations);
    }
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      read(g, "context_char_budget", c.generator.context_char_budget);
      read(g, "max_output_tokens", c.generator.max_output_tokens);
      read(g, "history_capacity", c.generator.history_capacity);
    }
    if (j.contains("embedder")) {
      const auto& e = j.at("embedder");
      read(e, "kind", c.embedder.kind);
      read(e, "dimension", c.embedder.dimension);
      read(e, "endpoint", c.embedder.endpoint);
      read(e, "token_env", c.embedder.token_env);
      read(e, "timeout", c.embedder.timeout_seconds);
    }
    if (j.contains("llm")) {
      const auto& l = j.at("llm");
      read(l, "kind", c.llm.kind);
      read(l, "endpoint", c.llm.endpoint);
      read(l, "model", c.llm.model);
      read(l, "api_key_env", c.llm.api_key_env);
      read(l, "timeout", c.llm.timeout_seconds);
    }
    read(j, "session_capacity", c.session_capacity);
    if (j.contains("session_journal")) c.session_journal = resolve(j.at("session_journal").get<std::string>(), base_dir);
    if (j.contains("telemetry_log")) c.telemetry_log = resolve(j.at("telemetry_log").get<std::string>(), base_dir);
    if (j.contains("static_dir")) c.static_dir = resolve(j.at("static_dir").get<std::string>(), base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad service config: ") + e.what());
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path) {
  return from_json_text(io::read_file(path), path.parent_path());
}

std::shared_ptr<embedding::EmbeddingProvider> make_embedder(const EmbedderSettings& s) {
  if (s.kind == "remote") {
    return std::make_shared<embedding::RemoteEmbedder>(embedding::RemoteEmbedderConfig{
        s.endpoint, s.dimension, s.token_env, std::chrono::duration<double>(s.timeout_seconds)});
  }
  return std::make_shared<embedding::LocalHashEmbedder>(s.dimension);
}

std::shared_ptr<llm::LlmProvider> make_llm(const LlmSettings& s) {
  if (s.kind == "remote") {
    return std::make_shared<llm::RemoteLlm>(
        llm::RemoteLlmConfig{s.endpoint, s.model, s.api_key_env, std::chrono::duration<double>(s.timeout_seconds)});
  }
  return std::make_shared<generator::StubLlm>();
}

}  // namespace fedqa::config
