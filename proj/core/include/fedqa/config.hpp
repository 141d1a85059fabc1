#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "fedqa/dedup.hpp"
#include "fedqa/embedding.hpp"
#include "fedqa/generator.hpp"
#include "fedqa/llm.hpp"
#include "fedqa/ranking.hpp"
#include "fedqa/retriever.hpp"

namespace fedqa::config {

struct EmbedderSettings {
  std::string kind = "local";  // "local" | "remote"
  std::size_t dimension = embedding::LocalHashEmbedder::kDefaultDimension;
  std::string endpoint;
  std::string token_env;
  double timeout_seconds = 30.0;
};

struct LlmSettings {
  std::string kind = "stub";  // "stub" | "remote"
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_seconds = 60.0;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path registry_path;
  dedup::SimilarityWeights dedup;
  ranking::Bm25Params bm25;
  retriever::EnsembleConfig retriever;
  generator::GeneratorConfig generator;
  EmbedderSettings embedder;
  LlmSettings llm;
  std::size_t session_capacity = 256;
  std::optional<std::filesystem::path> session_journal;
  std::optional<std::filesystem::path> telemetry_log;
  std::optional<std::filesystem::path> static_dir;

  /// Throws kInvalidConfig.
  void validate() const;

  /// Unknown keys are ignored; relative paths resolve against base_dir.
  static ServiceConfig from_json_text(std::string_view json, const std::filesystem::path& base_dir = {});
  static ServiceConfig from_file(const std::filesystem::path& path);
};

std::shared_ptr<embedding::EmbeddingProvider> make_embedder(const EmbedderSettings& settings);
std::shared_ptr<llm::LlmProvider> make_llm(const LlmSettings& settings);

}  // namespace fedqa::config
