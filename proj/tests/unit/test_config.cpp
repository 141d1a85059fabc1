#include <gtest/gtest.h>

#include "fedqa/config.hpp"
#include "fedqa/error.hpp"
#include "generators.hpp"

using namespace fedqa;
using namespace fedqa::config;

TEST(Config, DefaultsValidate) {
  ServiceConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.session_capacity, 256u);
  EXPECT_EQ(c.retriever.top_k, 5u);
  EXPECT_DOUBLE_EQ(c.dedup.merge_threshold, 0.85);
  EXPECT_EQ(c.generator.context_char_budget, 24000u);
}

TEST(Config, ParsesSectionsAndResolvesPaths) {
  const auto c = ServiceConfig::from_json_text(R"({
      "port": 9000, "registry": "reg.json", "session_capacity": 3,
      "dedup": {"threshold": 0.9},
      "ranking": {"k1": 1.2},
      "retriever": {"top_k": 7, "fusion": "weighted"},
      "llm": {"kind": "stub"},
      "telemetry_log": "logs/t.jsonl"})",
                                              "/base");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.registry_path, std::filesystem::path("/base/reg.json"));
  EXPECT_EQ(c.session_capacity, 3u);
  EXPECT_DOUBLE_EQ(c.dedup.merge_threshold, 0.9);
  EXPECT_DOUBLE_EQ(c.bm25.k1, 1.2);
  EXPECT_EQ(c.retriever.top_k, 7u);
  EXPECT_EQ(c.retriever.fusion, retriever::FusionMethod::kWeightedScore);
  EXPECT_EQ(*c.telemetry_log, std::filesystem::path("/base/logs/t.jsonl"));
}

TEST(Config, RejectsInvalid) {
  for (const char* bad : {R"({"session_capacity": 0})", R"({"retriever": {"fusion": "magic"}})",
                          R"({"dedup": {"title": 0.9}})", "{oops", R"({"llm": {"kind": "psychic"}})"}) {
    try {
      ServiceConfig::from_json_text(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig) << bad;
    }
  }
}

TEST(Config, ProviderFactories) {
  EmbedderSettings es;
  EXPECT_EQ(make_embedder(es)->dimension(), 512u);
  LlmSettings ls;
  EXPECT_NE(make_llm(ls), nullptr);
  const auto c = ServiceConfig::from_file(fedqa::testing::fixtures_dir() / "service.json");
  EXPECT_EQ(c.registry_path, fedqa::testing::fixtures_dir() / "registry.json");
}
